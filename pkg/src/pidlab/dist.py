"""Finite joint distributions and the Shannon functionals built on them.

All logarithms are base 2 and all information quantities are reported in
bits, with the conventions 0*log(0) = 0 and 0*log(0/0) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    NegativeMass,
    NotNormalized,
    OverlappingGroups,
    PairingIncomplete,
    ShapeMismatch,
    UnknownVariable,
)

#: Mass at or below this value is treated as structurally zero when building
#: conditionals and support graphs.
SUPPORT_EPS = 1e-15

#: Default tolerance on input normalization.
NORM_TOL = 1e-9

#: Tensors larger than this are refused (desk-scale scope).
MAX_CELLS = 10**7

LN2 = np.log(2.0)


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite alphabet of distinct symbol strings."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not self.labels:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("alphabet labels must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown symbol {label!r}") from None


def product_alphabet(a: Alphabet, b: Alphabet, sep: str = ",") -> Alphabet:
    """Cartesian product alphabet with composite labels '(x,y)'."""
    return Alphabet(tuple(f"({x}{sep}{y})" for x in a.labels for y in b.labels))


@dataclass(frozen=True)
class JointDist:
    """Dense joint distribution over a finite product alphabet.

    Immutable after construction; the mass array is set read-only.  Use
    :func:`validate` to normalize and sanity-check raw input.
    """

    names: tuple[str, ...]
    alphabets: tuple[Alphabet, ...]
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "alphabets", tuple(self.alphabets))
        mass = np.asarray(self.mass, dtype=float)
        if len(self.names) != len(self.alphabets):
            raise ValueError("names and alphabets must have equal length")
        if len(self.names) < 1:
            raise ValueError("arity must be >= 1")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be distinct")
        expected = tuple(len(a) for a in self.alphabets)
        if mass.shape != expected:
            raise ShapeMismatch(f"mass shape {mass.shape} != alphabet sizes {expected}")
        if mass.size > MAX_CELLS:
            raise ValueError(f"tensor too large ({mass.size} cells > {MAX_CELLS})")
        mass = mass.copy()
        mass.flags.writeable = False
        object.__setattr__(self, "mass", mass)

    # -- bookkeeping ------------------------------------------------------

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def alphabet(self, name: str) -> Alphabet:
        return self.alphabets[self.axis(name)]

    @property
    def arity(self) -> int:
        return len(self.names)

    def _axes(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.axis(n) for n in names)


@dataclass(frozen=True)
class Channel:
    """Conditional distribution of ``target`` given ``given``.

    Rows exist exactly for given-symbols whose marginal mass is above the
    support threshold; each row sums to 1.
    """

    given: str
    target: str
    rows: Mapping[str, np.ndarray]

    def row(self, symbol: str) -> np.ndarray:
        return self.rows[symbol]


def validate(raw: JointDist, tol: float = NORM_TOL) -> JointDist:
    """Clamp numerical dust, check normalization, and renormalize exactly."""
    mass = np.array(raw.mass, dtype=float)
    if mass.min() < -1e-12:
        raise NegativeMass(f"cell with mass {mass.min()} < -1e-12")
    mass[mass < SUPPORT_EPS] = 0.0
    total = mass.sum()
    if abs(total - 1.0) > tol:
        raise NotNormalized(f"total mass {total} deviates from 1 by more than {tol}")
    mass /= total
    return JointDist(raw.names, raw.alphabets, mass)


def marginal(P: JointDist, keep: Iterable[str]) -> JointDist:
    """Sum out every variable not in ``keep`` (result in P's variable order)."""
    keep = list(keep)
    if not keep:
        raise UnknownVariable("keep-set must be nonempty")
    keep_axes = set(P._axes(keep))
    order = [i for i in range(P.arity) if i in keep_axes]
    drop = tuple(i for i in range(P.arity) if i not in keep_axes)
    mass = P.mass.sum(axis=drop) if drop else P.mass
    return JointDist(
        tuple(P.names[i] for i in order),
        tuple(P.alphabets[i] for i in order),
        mass,
    )


def conditional(P: JointDist, target: str, given: str) -> Channel:
    """Channel P(target | given), rows only on the support of ``given``."""
    if target == given:
        raise UnknownVariable("target and given must differ")
    pair = marginal(P, [target, given])
    t_ax, g_ax = pair.axis(target), pair.axis(given)
    table = np.moveaxis(pair.mass, (g_ax, t_ax), (0, 1))
    rows = {}
    for i, symbol in enumerate(P.alphabet(given).labels):
        w = table[i].sum()
        if w > SUPPORT_EPS:
            rows[symbol] = table[i] / w
    return Channel(given=given, target=target, rows=rows)


def _plogp(p: np.ndarray) -> float:
    """Sum of p*log2(p) with the 0*log 0 = 0 convention."""
    p = p[p > 0]
    return float(np.sum(p * np.log2(p)))


def entropy(P: JointDist, vars: Iterable[str] | None = None) -> float:
    """Shannon entropy, in bits, of the marginal on ``vars`` (default: all)."""
    M = P if vars is None else marginal(P, vars)
    return -_plogp(M.mass.ravel())


def mutual_information(P: JointDist, groupA: Iterable[str], groupB: Iterable[str]) -> float:
    """I(A;B) = H(A) + H(B) - H(AB), in bits."""
    return conditional_mutual_information(P, groupA, groupB, [])


def conditional_mutual_information(
    P: JointDist,
    A: Iterable[str],
    B: Iterable[str],
    C: Iterable[str] = (),
) -> float:
    """I(A;B|C) in bits; C may be empty, which reduces to I(A;B)."""
    A, B, C = list(A), list(B), list(C)
    if not A or not B:
        raise OverlappingGroups("groups A and B must be nonempty")
    groups = [set(A), set(B), set(C)]
    for i in range(3):
        for j in range(i + 1, 3):
            if groups[i] & groups[j]:
                raise OverlappingGroups(f"groups overlap: {groups[i] & groups[j]}")
    h_ac = entropy(P, A + C)
    h_bc = entropy(P, B + C)
    h_abc = entropy(P, A + B + C)
    h_c = entropy(P, C) if C else 0.0
    return h_ac + h_bc - h_abc - h_c


def kl_divergence(p, q) -> float:
    """D(p || q) in bits; +inf when supp(p) is not contained in supp(q).

    Accepts probability vectors (array-like) or two JointDist values of the
    same shape.
    """
    if isinstance(p, JointDist) or isinstance(q, JointDist):
        if not (isinstance(p, JointDist) and isinstance(q, JointDist)):
            raise ShapeMismatch("cannot mix JointDist and raw vector")
        pv, qv = p.mass.ravel(), q.mass.ravel()
        if p.mass.shape != q.mass.shape:
            raise ShapeMismatch(f"{p.mass.shape} != {q.mass.shape}")
    else:
        pv = np.asarray(p, dtype=float).ravel()
        qv = np.asarray(q, dtype=float).ravel()
        if pv.shape != qv.shape:
            raise ShapeMismatch(f"{pv.shape} != {qv.shape}")
    on = pv > 0
    if np.any(qv[on] <= 0):
        return float("inf")
    return float(np.sum(pv[on] * np.log2(pv[on] / qv[on])))


def l1_distance(P1: JointDist, P2: JointDist) -> float:
    """Unhalved L1 distance, in [0, 2]."""
    if P1.mass.shape != P2.mass.shape:
        raise ShapeMismatch(f"{P1.mass.shape} != {P2.mass.shape}")
    return float(np.abs(P1.mass - P2.mass).sum())


def tensor_product(
    P1: JointDist,
    P2: JointDist,
    pairing: Sequence[tuple[str, str, str]],
) -> JointDist:
    """Independent product with composite variables.

    Each pairing entry (name1, name2, newname) fuses one variable of P1 with
    one of P2 into a composite variable whose alphabet is the cartesian
    product of the source alphabets.  The pairing must cover every variable
    of both inputs exactly once.
    """
    n1 = [p[0] for p in pairing]
    n2 = [p[1] for p in pairing]
    if sorted(n1) != sorted(P1.names) or sorted(n2) != sorted(P2.names):
        raise PairingIncomplete("pairing must cover all variables of both inputs exactly once")
    # Reorder both factors to the pairing order, then interleave axes.
    ax1 = P1._axes(n1)
    ax2 = P2._axes(n2)
    m1 = np.moveaxis(P1.mass, ax1, range(len(ax1)))
    m2 = np.moveaxis(P2.mass, ax2, range(len(ax2)))
    k = len(pairing)
    prod = np.multiply.outer(m1, m2)  # axes: a1..ak, b1..bk
    prod = np.moveaxis(prod, range(k, 2 * k), range(1, 2 * k, 2))  # a1,b1,a2,b2,...
    new_shape = tuple(m1.shape[i] * m2.shape[i] for i in range(k))
    prod = prod.reshape(new_shape)
    names = tuple(p[2] for p in pairing)
    alphabets = tuple(
        product_alphabet(P1.alphabets[ax1[i]], P2.alphabets[ax2[i]]) for i in range(k)
    )
    return JointDist(names, alphabets, prod)


def combine_variables(P: JointDist, merge: Iterable[str], newname: str) -> JointDist:
    """Merge several variables into one composite variable.

    The composite takes the position of the first merged variable (in P's
    order); its alphabet is the product alphabet of the merged variables.
    """
    merge = list(merge)
    if len(merge) < 2:
        raise UnknownVariable("merge-set must contain at least two variables")
    merge_axes = P._axes(merge)
    order = sorted(merge_axes)
    rest = [i for i in range(P.arity) if i not in merge_axes]
    # Move merged axes (in their original axis order) to the front of the
    # insertion slot, flatten, then restore surrounding order.
    insert_at = order[0]
    perm = []
    for i in range(P.arity):
        if i == insert_at:
            perm.extend(order)
        elif i not in merge_axes:
            perm.append(i)
    mass = np.transpose(P.mass, perm)
    pos = perm.index(order[0])
    k = len(order)
    shape = mass.shape[:pos] + (-1,) + mass.shape[pos + k:]
    mass = mass.reshape(shape)
    alpha = P.alphabets[order[0]]
    for i in order[1:]:
        alpha = product_alphabet(alpha, P.alphabets[i])
    names, alphabets = [], []
    for i in range(P.arity):
        if i == insert_at:
            names.append(newname)
            alphabets.append(alpha)
        elif i not in merge_axes:
            names.append(P.names[i])
            alphabets.append(P.alphabets[i])
    return JointDist(tuple(names), tuple(alphabets), mass)


def full_support(P: JointDist) -> bool:
    """True when every cell exceeds the structural support threshold."""
    return bool(P.mass.min() > SUPPORT_EPS)
