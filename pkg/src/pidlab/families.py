"""Named generators of benchmark joint distributions.

Includes the discontinuity families (parametrized pair-marginal tables
completed by conditional independence given S, and the block-diagonal
common-information family), the canonical logic gates, and seeded Dirichlet
ensembles.  Every generated distribution passes validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import Alphabet, JointDist, validate
from .errors import ParameterOutOfRange

FAMILY_NAMES = (
    "red_discontinuity",
    "gk_discontinuity",
    "xor",
    "and_gate",
    "copy",
    "unq",
    "rdn",
    "dirichlet_random",
)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)


def _bit() -> Alphabet:
    return Alphabet(("0", "1"))


def _gate(table) -> JointDist:
    """2x2x2 gate from a dict {(s,y,z): mass}."""
    mass = np.zeros((2, 2, 2))
    for (s, y, z), p in table.items():
        mass[s, y, z] = p
    return validate(JointDist(("S", "Y", "Z"), (_bit(), _bit(), _bit()), mass))


def red_discontinuity(a: float) -> JointDist:
    """The parametrized family with vanishing-support discontinuity.

    Only the (S,Y) and (S,Z) pair marginals are pinned; the joint is
    completed by conditional independence of Y and Z given S (all measures
    exercised on this family depend on the pair marginals alone).
    """
    if not 0.0 <= a <= 1.0:
        raise ParameterOutOfRange(f"a={a} outside [0, 1]")
    sy = np.zeros((2, 3))
    sy[1, 0] = a / 2
    sy[1, 1] = 0.5 - a / 2
    sy[0, 1] = 0.25
    sy[0, 2] = 0.25
    sz = np.zeros((2, 3))
    sz[0, 0] = a / 2
    sz[0, 1] = 0.5 - a / 2
    sz[1, 1] = 0.25
    sz[1, 2] = 0.25
    ps = sy.sum(axis=1)
    mass = np.zeros((2, 3, 3))
    for s in range(2):
        if ps[s] > 0:
            mass[s] = np.outer(sy[s], sz[s]) / ps[s]
    return validate(
        JointDist(
            ("S", "Y", "Z"),
            (_bit(), Alphabet(("0", "1", "2")), Alphabet(("0", "1", "2"))),
            mass,
        )
    )


def gk_discontinuity(eps: float) -> JointDist:
    """Block-diagonal (Y,Z) with an off-block bridge of mass eps and
    S = (Y,Z); the common-information component count drops at eps > 0."""
    if not 0.0 <= eps <= 1.0:
        raise ParameterOutOfRange(f"eps={eps} outside [0, 1]")
    pyz = np.zeros((2, 2))
    pyz[0, 0] = (1.0 - eps) / 2
    pyz[1, 1] = (1.0 - eps) / 2
    pyz[0, 1] = eps
    s_alpha = Alphabet(("(0,0)", "(0,1)", "(1,0)", "(1,1)"))
    mass = np.zeros((4, 2, 2))
    for y in range(2):
        for z in range(2):
            mass[2 * y + z, y, z] = pyz[y, z]
    return validate(JointDist(("S", "Y", "Z"), (s_alpha, _bit(), _bit()), mass))


def xor() -> JointDist:
    return _gate({(y ^ z, y, z): 0.25 for y in range(2) for z in range(2)})


def and_gate() -> JointDist:
    return _gate({(y & z, y, z): 0.25 for y in range(2) for z in range(2)})


def copy_gate() -> JointDist:
    """S = (Y,Z) with independent uniform sources."""
    s_alpha = Alphabet(("(0,0)", "(0,1)", "(1,0)", "(1,1)"))
    mass = np.zeros((4, 2, 2))
    for y in range(2):
        for z in range(2):
            mass[2 * y + z, y, z] = 0.25
    return validate(JointDist(("S", "Y", "Z"), (s_alpha, _bit(), _bit()), mass))


def unq(side: str = "y") -> JointDist:
    """S copies one source; the other is independent uniform."""
    if side not in ("y", "z"):
        raise ParameterOutOfRange("side must be 'y' or 'z'")
    if side == "y":
        return _gate({(y, y, z): 0.25 for y in range(2) for z in range(2)})
    return _gate({(z, y, z): 0.25 for y in range(2) for z in range(2)})


def rdn() -> JointDist:
    return _gate({(b, b, b): 0.5 for b in range(2)})


def dirichlet_random(shape=(2, 2, 2), seed: int = 0, alpha: float = 1.0) -> JointDist:
    """Seeded flat-Dirichlet tensor over (S, Y, Z[, U]); full support a.s."""
    shape = tuple(int(k) for k in shape)
    if len(shape) not in (3, 4) or min(shape) < 2:
        raise ParameterOutOfRange(f"unsupported shape {shape}")
    if alpha <= 0:
        raise ParameterOutOfRange("alpha must be positive")
    rng = np.random.default_rng(int(seed))
    n = int(np.prod(shape))
    mass = rng.dirichlet(np.full(n, float(alpha))).reshape(shape)
    names = ("S", "Y", "Z", "U")[: len(shape)]
    alphabets = tuple(Alphabet(tuple(str(i) for i in range(k))) for k in shape)
    return validate(JointDist(names, alphabets, mass))


def generate(spec: FamilySpec) -> JointDist:
    """Instantiate a named family member; parameters are range-checked."""
    name, p = spec.name, dict(spec.params)
    if name == "red_discontinuity":
        return red_discontinuity(float(p.pop("a")))
    if name == "gk_discontinuity":
        return gk_discontinuity(float(p.pop("eps")))
    if name == "xor":
        return xor()
    if name == "and_gate":
        return and_gate()
    if name == "copy":
        return copy_gate()
    if name == "unq":
        return unq(p.pop("side", "y"))
    if name == "rdn":
        return rdn()
    if name == "dirichlet_random":
        shape = p.pop("shape", (2, 2, 2))
        if isinstance(shape, str):
            shape = tuple(int(k) for k in shape.split("x"))
        return dirichlet_random(shape, int(p.pop("seed", 0)), float(p.pop("alpha", 1.0)))
    raise ParameterOutOfRange(f"unknown family {name!r}")
