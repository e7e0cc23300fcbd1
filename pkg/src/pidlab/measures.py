"""The bivariate decomposition catalogue.

Every measure maps a joint distribution of (S, Y, Z) to a
:class:`PidResult` with shared (si), unique (ui_y, ui_z) and complementary
(ci) components in bits, linked by

    I(S;YZ) = si + ci + ui_y + ui_z
    I(S;Y)  = si + ui_y
    I(S;Z)  = si + ui_z
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dist as dc
from .dist import JointDist, SUPPORT_EPS
from .errors import (
    DeltaOutOfRange,
    InconsistentAnchor,
    NotFullSupport,
    ZeroProbabilityOutcome,
)
from .optim import (
    DeltaPolytope,
    SolveReport,
    fw_kl_mixture,
    ipf_fit,
    minimize_cmi_over_delta,
    minimize_scalar_convex,
)

MEASURE_IDS = ("min", "mmi", "red", "broja", "dep", "ig", "cap_wedge")

CONSISTENCY_TOL = 1e-7


@dataclass(frozen=True)
class PidResult:
    measure_id: str
    si: float
    ui_y: float
    ui_z: float
    ci: float
    diagnostics: tuple[SolveReport, ...] = field(default=())

    def components(self) -> dict[str, float]:
        return {"si": self.si, "ui_y": self.ui_y, "ui_z": self.ui_z, "ci": self.ci}


@dataclass(frozen=True)
class SpecificInfo:
    outcome: str
    value: float


def _mis(P: JointDist, s: str, y: str, z: str) -> tuple[float, float, float]:
    iy = dc.mutual_information(P, [s], [y])
    iz = dc.mutual_information(P, [s], [z])
    iyz = dc.mutual_information(P, [s], [y, z])
    return iy, iz, iyz


def complete_decomposition(
    P: JointDist,
    anchor: dict,
    measure_id: str,
    s: str = "S",
    y: str = "Y",
    z: str = "Z",
    diagnostics: tuple[SolveReport, ...] = (),
) -> PidResult:
    """Solve the remaining components from the three linear identities.

    ``anchor`` holds exactly one of: {"si": bits}, {"ci": bits}, or
    {"ui_pair": (ui_y, ui_z)}.  A ui_pair anchor must satisfy the
    consistency condition I(S;Y) + ui_z = I(S;Z) + ui_y.
    """
    iy, iz, iyz = _mis(P, s, y, z)
    if set(anchor) == {"si"}:
        si = float(anchor["si"])
        ui_y = iy - si
        ui_z = iz - si
    elif set(anchor) == {"ci"}:
        ci = float(anchor["ci"])
        si = iy + iz - iyz + ci
        ui_y = iy - si
        ui_z = iz - si
        return PidResult(measure_id, si, ui_y, ui_z, ci, diagnostics)
    elif set(anchor) == {"ui_pair"}:
        ui_y, ui_z = (float(v) for v in anchor["ui_pair"])
        resid = (iy + ui_z) - (iz + ui_y)
        if abs(resid) > CONSISTENCY_TOL:
            raise InconsistentAnchor(
                f"ui_pair violates the consistency condition by {resid}"
            )
        si = 0.5 * ((iy - ui_y) + (iz - ui_z))
    else:
        raise ValueError("anchor must be one of si, ci, ui_pair")
    ci = iyz - si - ui_y - ui_z
    return PidResult(measure_id, si, ui_y, ui_z, ci, diagnostics)


# ---------------------------------------------------------------------------
# I_min and I_MMI
# ---------------------------------------------------------------------------


def specific_information(P: JointDist, s_outcome: str, target: str, s: str = "S") -> SpecificInfo:
    """I(S=s; target) = sum_t P(t|s) log2 P(s|t)/P(s)."""
    s_ax = P.alphabet(s).index(s_outcome)
    ps = dc.marginal(P, [s]).mass[s_ax]
    if ps <= SUPPORT_EPS:
        raise ZeroProbabilityOutcome(f"P({s}={s_outcome}) = 0")
    pair = dc.marginal(P, [s, target])
    joint = np.moveaxis(pair.mass, pair.axis(s), 0)[s_ax]  # P(s, t) over t
    pt = np.moveaxis(pair.mass, pair.axis(s), 0).sum(axis=0)
    on = joint > 0
    value = float(np.sum((joint[on] / ps) * np.log2(joint[on] / (pt[on] * ps))))
    return SpecificInfo(s_outcome, value)


def si_min(P: JointDist, s: str = "S", y: str = "Y", z: str = "Z") -> PidResult:
    ps = dc.marginal(P, [s]).mass
    total = 0.0
    for i, label in enumerate(P.alphabet(s).labels):
        if ps[i] <= SUPPORT_EPS:
            continue
        vy = specific_information(P, label, y, s).value
        vz = specific_information(P, label, z, s).value
        total += ps[i] * min(vy, vz)
    return complete_decomposition(P, {"si": total}, "min", s, y, z)


def si_mmi(P: JointDist, s: str = "S", y: str = "Y", z: str = "Z") -> PidResult:
    iy = dc.mutual_information(P, [s], [y])
    iz = dc.mutual_information(P, [s], [z])
    return complete_decomposition(P, {"si": min(iy, iz)}, "mmi", s, y, z)


# ---------------------------------------------------------------------------
# I_red (projected specific information)
# ---------------------------------------------------------------------------


def i_searrow(
    P: JointDist,
    from_var: str,
    onto_var: str,
    s: str = "S",
    tol: float = 1e-10,
) -> tuple[float, tuple[SolveReport, ...]]:
    """Projected information of ``from_var`` about S relative to ``onto_var``.

    For each support symbol y of ``from_var``, P(S|y) is KL-projected onto
    the convex hull of {P(S|z) : z in support of ``onto_var``}; the value is
    the P(y)-average of D(P(S|y)||P(S)) - D(P(S|y)||projection).
    """
    prior = dc.marginal(P, [s]).mass
    chan_y = dc.conditional(P, s, from_var)
    chan_z = dc.conditional(P, s, onto_var)
    atoms = [chan_z.rows[sym] for sym in P.alphabet(onto_var).labels if sym in chan_z.rows]
    py = {
        sym: w
        for sym, w in zip(
            P.alphabet(from_var).labels, dc.marginal(P, [from_var]).mass
        )
    }
    total = 0.0
    reports = []
    for sym, row in chan_y.rows.items():
        w, rep = fw_kl_mixture(row, atoms, tol=tol)
        reports.append(rep)
        d_prior = dc.kl_divergence(row, prior)
        total += py[sym] * (d_prior - rep.objective)
    return total, tuple(reports)


def si_red(P: JointDist, s: str = "S", y: str = "Y", z: str = "Z") -> PidResult:
    vy, ry = i_searrow(P, y, z, s)
    vz, rz = i_searrow(P, z, y, s)
    si = vy if vy <= vz else vz  # ties toward the Y-side candidate
    return complete_decomposition(P, {"si": si}, "red", s, y, z, diagnostics=ry + rz)


# ---------------------------------------------------------------------------
# I_BROJA
# ---------------------------------------------------------------------------


def ui_broja(
    P: JointDist,
    s: str = "S",
    y: str = "Y",
    z: str = "Z",
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> PidResult:
    """Unique information as the minimal conditional MI over Delta_P.

    The two unique components come from two separate convex programs over
    the same polytope (roles of Y and Z swapped); the consistency condition
    is then asserted by the caller's residual checks, not assumed.
    """
    poly_y = DeltaPolytope.from_joint(P, s, y, z)
    _, rep_y = minimize_cmi_over_delta(poly_y, tol=tol, max_iter=max_iter)
    poly_z = DeltaPolytope.from_joint(P, s, z, y)
    _, rep_z = minimize_cmi_over_delta(poly_z, tol=tol, max_iter=max_iter)
    return complete_decomposition(
        P,
        {"ui_pair": (rep_y.objective, rep_z.objective)},
        "broja",
        s, y, z,
        diagnostics=(rep_y, rep_z),
    )


# ---------------------------------------------------------------------------
# I_dep
# ---------------------------------------------------------------------------


def markov_chain_dist(P: JointDist, s: str = "S", y: str = "Y", z: str = "Z") -> JointDist:
    """The closed-form maxent point P(s,y)P(s,z)/P(s) with Y - S - Z Markov."""
    poly = DeltaPolytope.from_joint(P, s, y, z)
    return JointDist(
        (s, y, z),
        (P.alphabet(s), P.alphabet(y), P.alphabet(z)),
        poly.markov_point(),
    )


def ui_dep(
    P: JointDist,
    s: str = "S",
    y: str = "Y",
    z: str = "Z",
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> PidResult:
    """Unique information from the dependency lattice: the smaller conditional
    MI between the pairwise maxent point and the Markov-chain point."""
    order = (s, y, z)
    alphas = tuple(P.alphabet(n) for n in order)
    chain = markov_chain_dist(P, s, y, z)
    constraints = []
    for pair in ((s, y), (s, z), (y, z)):
        m = dc.marginal(P, pair)
        table = np.moveaxis(m.mass, m.axis(pair[0]), 0)
        constraints.append((pair, table))
    maxent, rep = ipf_fit(order, alphas, constraints, tol=tol, max_iter=max_iter)

    def cmi(Q, a, b):
        return dc.conditional_mutual_information(Q, [s], [a], [b])

    # Both candidates share P's pair marginals, so the argmin is the same on
    # both sides; ties break toward the Markov-chain candidate.
    cand_y = (cmi(chain, y, z), cmi(maxent, y, z))
    cand_z = (cmi(chain, z, y), cmi(maxent, z, y))
    pick = 0 if cand_y[0] <= cand_y[1] else 1
    return complete_decomposition(
        P,
        {"ui_pair": (cand_y[pick], cand_z[pick])},
        "dep",
        s, y, z,
        diagnostics=(rep,),
    )


# ---------------------------------------------------------------------------
# I_IG (information geometry)
# ---------------------------------------------------------------------------


def _ig_family(P: JointDist, s: str, y: str, z: str):
    """Log-space setup of the interpolating family P^(t); requires full support."""
    axes = (P.axis(s), P.axis(y), P.axis(z))
    M = np.moveaxis(P.mass, axes, (0, 1, 2))
    if M.min() <= SUPPORT_EPS:
        raise NotFullSupport("the information-geometric measure requires full support")
    pyz = M.sum(axis=0)
    s_given_y = M.sum(axis=2) / M.sum(axis=(0, 2))[None, :]  # P(s|y)
    s_given_z = M.sum(axis=1) / M.sum(axis=(0, 1))[None, :]  # P(s|z)
    log_sy = np.log(s_given_y)[:, :, None]
    log_sz = np.log(s_given_z)[:, None, :]

    def p_t(t: float) -> np.ndarray:
        logq = np.log(pyz)[None, :, :] + t * log_sy + (1.0 - t) * log_sz
        q = np.exp(logq)
        return q / q.sum()

    return M, p_t


def decomp_ig(
    P: JointDist,
    s: str = "S",
    y: str = "Y",
    z: str = "Z",
    t_tol: float = 1e-11,
) -> PidResult:
    """Information-geometric decomposition via the e-geodesic between the two
    Markov-chain distributions; defined only on full-support inputs."""
    M, p_t = _ig_family(P, s, y, z)

    def objective(t: float) -> float:
        return dc.kl_divergence(M.ravel(), p_t(t).ravel())

    t_star, rep = minimize_scalar_convex(objective, (-10.0, 10.0), tol=t_tol)
    p_star = p_t(t_star)
    ci = dc.kl_divergence(M.ravel(), p_star.ravel())
    ui_y = dc.kl_divergence(p_star.ravel(), p_t(0.0).ravel())
    ui_z = dc.kl_divergence(p_star.ravel(), p_t(1.0).ravel())
    iy, iz, iyz = _mis(P, s, y, z)
    si = iy - ui_y
    return PidResult("ig", si, ui_y, ui_z, ci, (rep,))


# ---------------------------------------------------------------------------
# Gacs-Korner and the wedge decomposition
# ---------------------------------------------------------------------------


def gacs_korner_common(
    P: JointDist, a: str = "Y", b: str = "Z"
) -> tuple[float, dict[tuple[str, str], int]]:
    """Common information C(a ^ b) via connected components of the support
    graph; returns the entropy of the component variable and the labeling
    keyed by (variable, symbol)."""
    pair = dc.marginal(P, [a, b])
    table = np.moveaxis(pair.mass, pair.axis(a), 0)
    na, nb = table.shape
    # Union-find over a-symbols [0, na) and b-symbols [na, na+nb).
    parent = list(range(na + nb))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(na):
        for j in range(nb):
            if table[i, j] > SUPPORT_EPS:
                parent[find(i)] = find(na + j)

    roots: dict[int, int] = {}
    labeling: dict[tuple[str, str], int] = {}
    a_labels = P.alphabet(a).labels
    b_labels = P.alphabet(b).labels
    a_mass = table.sum(axis=1)
    b_mass = table.sum(axis=0)
    comp_mass: dict[int, float] = {}
    for i in range(na):
        if a_mass[i] > SUPPORT_EPS:
            r = find(i)
            cid = roots.setdefault(r, len(roots))
            labeling[(a, a_labels[i])] = cid
            comp_mass[cid] = comp_mass.get(cid, 0.0) + float(a_mass[i])
    for j in range(nb):
        if b_mass[j] > SUPPORT_EPS:
            cid = roots.setdefault(find(na + j), len(roots))
            labeling[(b, b_labels[j])] = cid
    masses = np.array(list(comp_mass.values()))
    masses = masses[masses > 0]
    c = -float(np.sum(masses * np.log2(masses)))
    return c, labeling


def si_cap_wedge(P: JointDist, s: str = "S", y: str = "Y", z: str = "Z") -> PidResult:
    """Shared information carried by the maximal common random variable of
    Y and Z (the Gacs-Korner lower bound of the cap-family measures)."""
    _, labeling = gacs_korner_common(P, y, z)
    n_comp = max(labeling.values()) + 1 if labeling else 1
    ns = len(P.alphabet(s))
    axes = (P.axis(s), P.axis(y), P.axis(z))
    M = np.moveaxis(P.mass, axes, (0, 1, 2))
    sq = np.zeros((ns, n_comp))
    for iy, sym in enumerate(P.alphabet(y).labels):
        cid = labeling.get((y, sym))
        if cid is not None:
            sq[:, cid] += M[:, iy, :].sum(axis=1)
    # I(Q;S) from the (S, Q) table.
    ps = sq.sum(axis=1)
    pq = sq.sum(axis=0)
    on = sq > 0
    si = float(np.sum(sq[on] * np.log2(sq[on] / (np.outer(ps, pq)[on]))))
    return complete_decomposition(P, {"si": si}, "cap_wedge", s, y, z)


# ---------------------------------------------------------------------------
# The UI construction
# ---------------------------------------------------------------------------


def ui_construction(
    delta_y: float,
    delta_z: float,
    P: JointDist,
    s: str = "S",
    y: str = "Y",
    z: str = "Z",
    slack: float = 1e-9,
) -> PidResult:
    """Smallest consistent decomposition whose unique components dominate the
    given lower bounds (delta_y, delta_z)."""
    iy, iz, _ = _mis(P, s, y, z)
    iy_gz = dc.conditional_mutual_information(P, [s], [y], [z])
    iz_gy = dc.conditional_mutual_information(P, [s], [z], [y])
    if not (-slack <= delta_y <= min(iy, iy_gz) + slack):
        raise DeltaOutOfRange(
            f"delta_y={delta_y} outside [0, min(I(S;Y), I(S;Y|Z))={min(iy, iy_gz)}]"
        )
    if not (-slack <= delta_z <= min(iz, iz_gy) + slack):
        raise DeltaOutOfRange(
            f"delta_z={delta_z} outside [0, min(I(S;Z), I(S;Z|Y))={min(iz, iz_gy)}]"
        )
    ui_y = max(delta_y, delta_z + iy - iz)
    ui_z = max(delta_z, delta_y + iz - iy)
    si = min(iy - delta_y, iz - delta_z)
    ci = min(iy_gz - delta_y, iz_gy - delta_z)
    return PidResult("ui_construction", si, ui_y, ui_z, ci)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_MEASURES = {
    "min": si_min,
    "mmi": si_mmi,
    "red": si_red,
    "broja": ui_broja,
    "dep": ui_dep,
    "ig": decomp_ig,
    "cap_wedge": si_cap_wedge,
}


def compute_measure(
    measure_id: str, P: JointDist, s: str = "S", y: str = "Y", z: str = "Z"
) -> PidResult:
    try:
        fn = _MEASURES[measure_id]
    except KeyError:
        raise ValueError(f"unknown measure {measure_id!r}") from None
    return fn(P, s, y, z)
