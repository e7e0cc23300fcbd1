"""Numerical engines: 1-D convex search, Frank-Wolfe with duality-gap
certificates for KL objectives, and iterative proportional fitting.

All engines are deterministic and report a :class:`SolveReport` whose
``certificate`` field is engine-specific: the final bracket width for the
scalar search, the Frank-Wolfe duality gap for the KL solvers, and the
maximum marginal residual for IPF.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dist import SUPPORT_EPS, Alphabet, JointDist, LN2
from .errors import (
    BracketFailure,
    InconsistentConstraints,
    InfeasibleSupport,
)

_TINY = 1e-18
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

#: Default convergence settings (far below the acceptance thresholds).
DEFAULT_GAP_TOL = 1e-9
DEFAULT_MARGINAL_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    objective: float
    certificate: float
    converged: bool
    tolerance_used: float


# ---------------------------------------------------------------------------
# 1-D convex minimization
# ---------------------------------------------------------------------------


def minimize_scalar_convex(
    f,
    bracket_init: tuple[float, float] = (-10.0, 10.0),
    tol: float = 1e-10,
    max_expand: int = 40,
) -> tuple[float, SolveReport]:
    """Golden-section minimization of a convex scalar function.

    The initial bracket expands geometrically (factor 3 in width) until it
    encloses a minimum; raises BracketFailure when no enclosing bracket is
    found within ``max_expand`` expansions.  On a flat objective the bracket
    midpoint is returned with certificate 0.
    """
    lo, hi = float(bracket_init[0]), float(bracket_init[1])
    if not hi > lo:
        raise BracketFailure("bracket must have positive width")
    fl, fh = f(lo), f(hi)
    mid = 0.5 * (lo + hi)
    fm = f(mid)
    enclosed = False
    for _ in range(max_expand + 1):
        scale = max(1.0, abs(fm))
        if abs(fl - fm) <= 1e-15 * scale and abs(fh - fm) <= 1e-15 * scale:
            # Flat objective: any point is a minimizer.
            return mid, SolveReport(0, fm, 0.0, True, tol)
        if fm <= fl and fm <= fh:
            enclosed = True
            break
        width = hi - lo
        if fl < fh:
            lo -= 2.0 * width
            fl = f(lo)
        else:
            hi += 2.0 * width
            fh = f(hi)
        mid = 0.5 * (lo + hi)
        fm = f(mid)
    if not enclosed:
        raise BracketFailure(
            f"no enclosing bracket after {max_expand} expansions "
            "(unbounded below or non-convex input)"
        )

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    iters = 0
    while hi - lo > tol and iters < 500:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        iters += 1
    t_star = 0.5 * (lo + hi)
    width = hi - lo
    return t_star, SolveReport(iters, f(t_star), width, width <= tol, tol)


def _linesearch(dphi, hi: float) -> float:
    """Exact minimizer of a convex 1-D function on [0, hi] via its derivative.

    ``dphi`` must be non-decreasing (convexity).  Returns 0 or ``hi`` when
    the minimum sits at an endpoint; otherwise brackets the sign change.
    """
    if hi <= 0.0:
        return 0.0
    if dphi(0.0) >= 0.0:
        return 0.0
    if dphi(hi) <= 0.0:
        return hi
    from scipy.optimize import brentq

    # The root can sit many decades below ``hi`` (mass scales span from the
    # shrink factor up to 1), so termination must be driven by the relative
    # tolerance; the absolute tolerance is set far below any usable step.
    g = float(brentq(dphi, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200))
    return g if g > 0.0 else np.nextafter(0.0, hi)


# ---------------------------------------------------------------------------
# Frank-Wolfe for KL mixture projection
# ---------------------------------------------------------------------------


def fw_kl_mixture(
    target,
    atoms,
    tol: float = DEFAULT_GAP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, SolveReport]:
    """Minimize D(target || sum_j w_j atom_j) over the simplex of weights.

    Away-step Frank-Wolfe with exact line search; the certificate is the
    Frank-Wolfe duality gap in bits.
    """
    t = np.asarray(target, dtype=float).ravel()
    A = np.asarray([np.asarray(a, dtype=float).ravel() for a in atoms])
    if A.ndim != 2 or A.shape[1] != t.shape[0]:
        raise InfeasibleSupport("atoms and target must share one dimension")
    k = A.shape[0]
    on = t > 0
    if np.any(A[:, on].max(axis=0) <= 0):
        raise InfeasibleSupport("target support not covered by the atoms")

    ts = t[on]
    As = A[:, on]
    w = np.full(k, 1.0 / k)
    mix = w @ As

    def objective(m):
        return float(np.sum(ts * np.log2(ts / np.maximum(m, _TINY))))

    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        # Gradient in bits per unit weight.
        grad = -(As @ (ts / np.maximum(mix, _TINY))) / LN2
        j_fw = int(np.argmin(grad))
        gap = float(grad @ w - grad[j_fw])
        if gap <= tol:
            break
        active = np.nonzero(w > 0)[0]
        j_aw = int(active[np.argmax(grad[active])])
        fw_score = float(grad @ w - grad[j_fw])
        aw_score = float(grad[j_aw] - grad @ w)
        if fw_score >= aw_score or len(active) == 1:
            d = As[j_fw] - mix
            dw = -w.copy()
            dw[j_fw] += 1.0
            gamma_max = 1.0
        else:
            d = mix - As[j_aw]
            dw = w.copy()
            dw[j_aw] -= 1.0
            gamma_max = w[j_aw] / (1.0 - w[j_aw]) if w[j_aw] < 1.0 else 1.0

        def dphi(g):
            return -float(np.sum(ts * d / np.maximum(mix + g * d, _TINY))) / LN2

        gamma = _linesearch(dphi, gamma_max)
        if gamma <= 0.0:
            break
        w = np.clip(w + gamma * dw, 0.0, None)
        w /= w.sum()
        mix = w @ As

    obj = objective(mix)
    return w, SolveReport(it, obj, gap, gap <= tol, tol)


# ---------------------------------------------------------------------------
# Transportation polytopes (the s-slices of Delta_P)
# ---------------------------------------------------------------------------


#: Cache of spanning-tree structure tensors keyed by (rows, cols) shape; the
#: structures depend only on the shape, not on the marginal values.
_TREE_STRUCTS: dict = {}


def _tree_structures(mm: int, nn: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spanning trees of the complete bipartite graph K_{mm,nn}, prepared for
    vectorized basic-solution computation.

    Returns (R, C, E): for tree t and tree-edge slot e, removing that edge
    splits the tree in two; R[t, e] and C[t, e] are 0/1 indicators of the
    rows and columns in the component containing the edge's row endpoint, so
    the basic value is R@rows - C@cols.  E[t, e] is the flat cell index.
    """
    key = (mm, nn)
    if key in _TREE_STRUCTS:
        return _TREE_STRUCTS[key]
    edges = [(i, j) for i in range(mm) for j in range(nn)]
    need = mm + nn - 1
    R_rows, C_rows, E_rows = [], [], []
    for combo in itertools.combinations(range(len(edges)), need):
        parent = list(range(mm + nn))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for e in combo:
            i, j = edges[e]
            a, b = find(i), find(mm + j)
            if a == b:
                ok = False
                break
            parent[a] = b
        if not ok:
            continue
        adj = [[] for _ in range(mm + nn)]
        for e in combo:
            i, j = edges[e]
            adj[i].append((mm + j, e))
            adj[mm + j].append((i, e))
        R = np.zeros((need, mm))
        C = np.zeros((need, nn))
        for slot, e in enumerate(combo):
            i, _ = edges[e]
            # Component containing the row endpoint with edge e removed.
            stack, seen_nodes = [i], {i}
            while stack:
                u = stack.pop()
                for v, ee in adj[u]:
                    if ee != e and v not in seen_nodes:
                        seen_nodes.add(v)
                        stack.append(v)
            for u in seen_nodes:
                if u < mm:
                    R[slot, u] = 1.0
                else:
                    C[slot, u - mm] = 1.0
        R_rows.append(R)
        C_rows.append(C)
        E_rows.append([e for e in combo])
    out = (
        np.asarray(R_rows),
        np.asarray(C_rows),
        np.asarray(E_rows, dtype=np.intp),
    )
    _TREE_STRUCTS[key] = out
    return out


def transportation_vertices(rows, cols, max_enum: int = 200_000) -> np.ndarray:
    """All vertices of {X >= 0 : X 1 = rows, X^T 1 = cols}.

    Vertices are basic solutions supported on spanning trees of the
    bipartite row/column graph; all trees are enumerated (structures cached
    per shape) and the feasible basic solutions kept.  Intended for small
    slices (alphabet sizes <= ~4); raises ValueError when the enumeration
    would exceed ``max_enum`` edge subsets.
    """
    r = np.asarray(rows, dtype=float)
    c = np.asarray(cols, dtype=float)
    if abs(r.sum() - c.sum()) > 1e-9 * max(1.0, r.sum()):
        raise InconsistentConstraints("row and column sums disagree")
    m, n = len(r), len(c)
    ridx = np.nonzero(r > SUPPORT_EPS)[0]
    cidx = np.nonzero(c > SUPPORT_EPS)[0]
    if len(ridx) == 0 or len(cidx) == 0:
        return np.zeros((1, m, n))
    rs, cs = r[ridx], c[cidx]
    mm, nn = len(ridx), len(cidx)
    need = mm + nn - 1
    from math import comb

    if comb(mm * nn, need) > max_enum:
        raise ValueError("transportation slice too large for vertex enumeration")

    R, C, E = _tree_structures(mm, nn)
    val = R @ rs - C @ cs  # (trees, need)
    keep = val.min(axis=1) >= -1e-12
    val = np.clip(val[keep], 0.0, None)
    Xs = np.zeros((val.shape[0], mm * nn))
    np.put_along_axis(Xs, E[keep], val, axis=1)
    # Deduplicate degenerate basic solutions that share a vertex.
    _, first = np.unique(np.round(Xs, 12), axis=0, return_index=True)
    Xs = Xs[np.sort(first)].reshape(-1, mm, nn)
    out = np.zeros((Xs.shape[0], m, n))
    out[:, ridx[:, None], cidx[None, :]] = Xs
    return out


@dataclass(frozen=True)
class DeltaPolytope:
    """The feasible set of joint distributions matching P's (S,Y) and (S,Z)
    pair marginals, sliced per S-outcome into transportation polytopes."""

    s_name: str
    y_name: str
    z_name: str
    s_alphabet: Alphabet
    y_alphabet: Alphabet
    z_alphabet: Alphabet
    sy_marginal: np.ndarray
    sz_marginal: np.ndarray

    def __post_init__(self):
        sy = np.asarray(self.sy_marginal, dtype=float)
        sz = np.asarray(self.sz_marginal, dtype=float)
        object.__setattr__(self, "sy_marginal", sy)
        object.__setattr__(self, "sz_marginal", sz)
        if np.abs(sy.sum(axis=1) - sz.sum(axis=1)).max() > 1e-12:
            raise InconsistentConstraints("pair marginals disagree on the S-marginal")

    @property
    def s_marginal(self) -> np.ndarray:
        return self.sy_marginal.sum(axis=1)

    @classmethod
    def from_joint(cls, P: JointDist, s: str, y: str, z: str) -> "DeltaPolytope":
        from .dist import marginal

        sy = marginal(P, [s, y])
        sz = marginal(P, [s, z])
        sy_m = np.moveaxis(sy.mass, sy.axis(s), 0)
        sz_m = np.moveaxis(sz.mass, sz.axis(s), 0)
        return cls(
            s, y, z,
            P.alphabet(s), P.alphabet(y), P.alphabet(z),
            sy_m, sz_m,
        )

    def slice_vertices(self) -> list[np.ndarray]:
        """Vertex list of each S-slice's transportation polytope (cached)."""
        cached = getattr(self, "_slice_vertices", None)
        if cached is None:
            cached = [
                transportation_vertices(self.sy_marginal[i], self.sz_marginal[i])
                for i in range(len(self.s_alphabet))
            ]
            object.__setattr__(self, "_slice_vertices", cached)
        return cached

    def markov_point(self) -> np.ndarray:
        """The relative-interior point P(s,y)P(s,z)/P(s) (Markov Y-S-Z)."""
        ps = self.s_marginal
        out = np.zeros(
            (len(self.s_alphabet), len(self.y_alphabet), len(self.z_alphabet))
        )
        for i in range(len(ps)):
            if ps[i] > SUPPORT_EPS:
                out[i] = np.outer(self.sy_marginal[i], self.sz_marginal[i]) / ps[i]
        return out


def _cmi_syz(Q: np.ndarray) -> float:
    """I(S;Y|Z) in bits of a joint tensor with axes (S, Y, Z)."""

    def h(p):
        p = p[p > 0]
        return -float(np.sum(p * np.log2(p)))

    return h(Q.sum(axis=1)) + h(Q.sum(axis=0)) - h(Q) - h(Q.sum(axis=(0, 1)))


def minimize_cmi_over_delta(
    poly: DeltaPolytope,
    tol: float = DEFAULT_GAP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: np.ndarray | None = None,
) -> tuple[JointDist, SolveReport]:
    """Minimize I_Q(S;Y|Z) over the marginal polytope Delta_P.

    Away-step Frank-Wolfe; the linear subproblem decomposes into one exact
    transportation problem per S-slice (solved by scanning the precomputed
    vertex list).  Certificate: Frank-Wolfe duality gap in bits.  On
    iteration exhaustion the best iterate is returned with converged=False.

    ``warm_start`` may supply a feasible (S, Y, Z) tensor used as the initial
    iterate (e.g. the product of factor optima on a composite input); it only
    accelerates the search and does not affect the certificate.
    """
    slice_verts = poly.slice_vertices()
    n_s = len(poly.s_alphabet)
    n_y = len(poly.y_alphabet)
    n_z = len(poly.z_alphabet)
    cells = n_y * n_z
    sz = poly.sz_marginal  # fixed on the feasible set
    pz = sz.sum(axis=0)

    # The conditional MI is convex but non-smooth where a whole (y,z) column
    # of the iterate vanishes, which can defeat the gradient-based gap test.
    # Optimize over the polytope shrunk towards the interior Markov point by
    # a tiny factor: every feasible point then keeps strictly positive mass
    # on the free support, the gradient is exact everywhere, and the optimal
    # value moves by at most mu * (f(interior) - f*) bits.
    mu = 1e-10
    interior = poly.markov_point()
    interior_flat = interior.reshape(n_s, cells)
    verts_flat = [sv.reshape(sv.shape[0], cells) for sv in slice_verts]

    def atom_row(key) -> np.ndarray:
        """Flattened shrunk vertex indexed by one vertex choice per S-slice."""
        v = np.concatenate([verts_flat[i][key[i]] for i in range(n_s)])
        return (1.0 - mu) * v + mu * interior_flat.ravel()

    if warm_start is None:
        x = interior.ravel().copy()
    else:
        warm = np.asarray(warm_start, dtype=float)
        if (
            np.abs(warm.sum(axis=2) - poly.sy_marginal).max() > 1e-8
            or np.abs(warm.sum(axis=1) - poly.sz_marginal).max() > 1e-8
        ):
            raise InconsistentConstraints("warm start violates the pair marginals")
        x = ((1.0 - mu) * warm + mu * interior).ravel()
    keys: list = ["interior"]
    atom_mat = x[None, :].copy()
    w = np.array([1.0])

    log2_pz = np.log2(np.maximum(pz, _TINY))
    log2_sz = np.log2(np.maximum(sz, _TINY))
    grad_const = (log2_pz[None, None, :] - log2_sz[:, None, :]).repeat(n_y, axis=1)
    dead = np.broadcast_to(sz[:, None, :] <= SUPPORT_EPS, (n_s, n_y, n_z)).ravel()
    grad_const = grad_const.ravel()
    sum_s = lambda v: v.reshape(n_s, cells).sum(axis=0)  # noqa: E731

    xyz = sum_s(x)
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad = (
            np.log2(np.maximum(x, _TINY))
            + grad_const
            - np.tile(np.log2(np.maximum(xyz, _TINY)), n_s)
        )
        grad[dead] = 0.0
        grad2 = grad.reshape(n_s, cells)
        fw_key = tuple(int(np.argmin(verts_flat[i] @ grad2[i])) for i in range(n_s))
        v = atom_row(fw_key)
        gx = float(grad @ x)
        gap = gx - float(grad @ v)
        if gap <= tol:
            break
        aw_idx = int(np.argmax(atom_mat @ grad))
        a = atom_mat[aw_idx]
        aw_score = float(grad @ a) - gx
        if gap >= aw_score or len(keys) == 1:
            step_fw = True
            d = v - x
            gamma_max = 1.0
        else:
            step_fw = False
            d = x - a
            wa = w[aw_idx]
            gamma_max = wa / (1.0 - wa) if wa < 1.0 else 1.0

        dyz = sum_s(d)

        def dphi(g):
            q = np.maximum(x + g * d, _TINY)
            qyz = np.maximum(xyz + g * dyz, _TINY)
            return float(d @ np.log2(q)) - float(dyz @ np.log2(qyz))

        gamma = _linesearch(dphi, gamma_max)
        if gamma <= 0.0:
            break
        if step_fw:
            w *= 1.0 - gamma
            try:
                idx = keys.index(fw_key)
                w[idx] += gamma
            except ValueError:
                keys.append(fw_key)
                atom_mat = np.vstack([atom_mat, v[None, :]])
                w = np.append(w, gamma)
        else:
            w *= 1.0 + gamma
            w[aw_idx] -= gamma
        live = w > 1e-15
        if not live.all():
            keys = [k for k, ok in zip(keys, live) if ok]
            atom_mat = atom_mat[live]
            w = w[live]
        x = x + gamma * d
        xyz = xyz + gamma * dyz
        if it % 128 == 0:
            # Resynchronize the iterate with its convex decomposition to
            # keep the pair-marginal residual at machine precision.
            x = (w / w.sum()) @ atom_mat
            xyz = sum_s(x)

    x = np.maximum(x, 0.0).reshape(n_s, n_y, n_z)
    Q = JointDist(
        (poly.s_name, poly.y_name, poly.z_name),
        (poly.s_alphabet, poly.y_alphabet, poly.z_alphabet),
        x / x.sum(),
    )
    obj = _cmi_syz(np.asarray(Q.mass))
    return Q, SolveReport(it, obj, gap, gap <= tol, tol)


# ---------------------------------------------------------------------------
# Iterative proportional fitting
# ---------------------------------------------------------------------------


def ipf_fit(
    names,
    alphabets,
    constraints,
    tol: float = DEFAULT_MARGINAL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    on_sweep=None,
) -> tuple[JointDist, SolveReport]:
    """Max-entropy fit to pair-marginal constraints by IPF from uniform.

    ``constraints`` is a list of ((nameA, nameB), table) pairs, the table
    indexed in that variable order.  Certificate: maximum marginal residual
    (sup norm).  Raises InconsistentConstraints when the residual stalls
    above tolerance with no progress over 100 sweeps.
    """
    names = tuple(names)
    alphabets = tuple(alphabets)
    shape = tuple(len(a) for a in alphabets)
    axis_of = {n: i for i, n in enumerate(names)}
    specs = []
    for (na, nb), table in constraints:
        t = np.asarray(table, dtype=float)
        axes = (axis_of[na], axis_of[nb])
        if t.shape != (shape[axes[0]], shape[axes[1]]):
            raise InconsistentConstraints(
                f"constraint table for ({na},{nb}) has shape {t.shape}"
            )
        specs.append((axes, t))

    Q = np.full(shape, 1.0 / np.prod(shape))

    def current(axes):
        other = tuple(i for i in range(len(shape)) if i not in axes)
        cur = Q.sum(axis=other)
        if axes[0] > axes[1]:
            cur = cur.T
        return cur

    def residual():
        return max(float(np.abs(current(axes) - t).max()) for axes, t in specs)

    best = np.inf
    stall = 0
    sweeps = 0
    res = residual()
    while res > tol and sweeps < max_iter:
        for axes, t in specs:
            cur = current(axes)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(cur > 0, t / np.where(cur > 0, cur, 1.0), 0.0)
            if np.any((cur <= 0) & (t > 0)):
                raise InconsistentConstraints(
                    "constraint mass outside the reachable support"
                )
            r = ratio
            if axes[0] > axes[1]:
                r = r.T
                a0, a1 = min(axes), max(axes)
            else:
                a0, a1 = axes
            expand = [None] * len(shape)
            idx = [np.newaxis] * len(shape)
            idx[a0] = slice(None)
            idx[a1] = slice(None)
            Q = Q * r[tuple(idx)]
        sweeps += 1
        res = residual()
        if on_sweep is not None:
            on_sweep(Q, res)
        # Inconsistent constraints drive the residual to a positive limit, so
        # the relative improvement vanishes; convergent instances keep making
        # geometric progress, however slow.
        if res < best * (1.0 - 1e-6):
            best = res
            stall = 0
        else:
            best = min(best, res)
            stall += 1
            if stall >= 1000:
                raise InconsistentConstraints(
                    f"IPF stalled at residual {res} > {tol}"
                )

    ent = -float(np.sum(Q[Q > 0] * np.log2(Q[Q > 0])))
    dist = JointDist(names, alphabets, Q / Q.sum())
    return dist, SolveReport(sweeps, ent, res, res <= tol, tol)
