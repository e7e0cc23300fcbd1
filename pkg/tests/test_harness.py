"""Tests for the verification harness: defects, probes, suites, oracle."""

import numpy as np
import pytest

from pidlab.dist import l1_distance, mutual_information
from pidlab.families import FamilySpec, dirichlet_random, generate, unq, xor
from pidlab.harness import (
    ADDITIVE_MEASURES,
    IID_MIN_WITNESS,
    SUITES,
    SUPERADDITIVE_COMPONENT,
    WITNESS_PAIRS,
    additivity_defect,
    broja_oracle,
    compose,
    consistency_check,
    constant_u_extension,
    continuity_probe,
    iid_additivity_check,
    locking_check,
    mmi_bound_sweep,
    perturb_full_support,
)
from pidlab.measures import MEASURE_IDS, compute_measure, ui_broja


# -- consistency and composition ----------------------------------------------


@pytest.mark.parametrize("measure", MEASURE_IDS)
def test_consistency_residuals_small(measure):
    P = dirichlet_random((2, 2, 2), seed=42)
    resid = consistency_check(P, compute_measure(measure, P))
    assert max(abs(v) for v in resid) <= 1e-7


def test_compose_is_independent_product():
    P1 = dirichlet_random((2, 2, 2), seed=0)
    P2 = dirichlet_random((2, 2, 2), seed=1)
    C = compose(P1, P2)
    assert C.names == ("S", "Y", "Z")
    assert C.mass.shape == (4, 4, 4)
    assert mutual_information(C, ["S"], ["Y", "Z"]) == pytest.approx(
        mutual_information(P1, ["S"], ["Y", "Z"])
        + mutual_information(P2, ["S"], ["Y", "Z"]),
        abs=1e-10,
    )


# -- additivity defects ---------------------------------------------------------


@pytest.mark.parametrize("measure", ADDITIVE_MEASURES)
def test_additive_measures_have_zero_defect(measure):
    P1 = dirichlet_random((2, 2, 2), seed=3)
    P2 = dirichlet_random((2, 2, 2), seed=4)
    defects = additivity_defect(measure, P1, P2)
    assert set(defects) == {"si", "ui_y", "ui_z", "ci"}
    assert max(abs(d.defect) for d in defects.values()) <= 1e-6


def test_mmi_witness_pair_defect_is_one_bit():
    d = additivity_defect("mmi", unq("y"), unq("z"))
    assert d["si"].defect == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("measure", sorted(WITNESS_PAIRS))
def test_pinned_witnesses_exceed_threshold(measure):
    f1, f2 = WITNESS_PAIRS[measure]
    comp = SUPERADDITIVE_COMPONENT[measure]
    d = additivity_defect(measure, generate(f1), generate(f2))[comp].defect
    assert d >= 1e-3


@pytest.mark.parametrize("measure", sorted(SUPERADDITIVE_COMPONENT))
def test_superadditive_component_never_negative(measure):
    comp = SUPERADDITIVE_COMPONENT[measure]
    for k in range(5):
        P1 = dirichlet_random((2, 2, 2), seed=50 + 2 * k)
        P2 = dirichlet_random((2, 2, 2), seed=51 + 2 * k)
        assert additivity_defect(measure, P1, P2)[comp].defect >= -1e-7


def test_iid_min_witness():
    d = iid_additivity_check("min", generate(IID_MIN_WITNESS))["si"].defect
    assert d >= 1e-3


def test_iid_broja_zero_defect():
    P = dirichlet_random((2, 2, 2), seed=6)
    defects = iid_additivity_check("broja", P)
    assert max(abs(d.defect) for d in defects.values()) <= 1e-6


# -- probes ---------------------------------------------------------------------


def test_continuity_probe_red_family_jump():
    limit, boundary, jump = continuity_probe("red", "red_discontinuity", [0.5, 1e-6])
    assert boundary == pytest.approx(0.16503749927884376, abs=1e-4)
    assert jump == pytest.approx(0.146241, abs=1e-3)


def test_continuity_probe_gk_family_jump():
    limit, boundary, jump = continuity_probe("cap_wedge", "gk_discontinuity", [1e-6])
    assert limit == 0.0
    assert boundary == pytest.approx(1.0, abs=1e-12)


def test_perturb_full_support_distance_and_validity():
    P = dirichlet_random((2, 2, 2), seed=7)
    Q = perturb_full_support(P, 1e-6, seed=7)
    assert l1_distance(P, Q) == pytest.approx(1e-6, rel=1e-9)
    assert Q.mass.min() > 0


def test_perturb_full_support_rejects_large_step():
    P = dirichlet_random((2, 2, 2), seed=8, alpha=0.2)
    with pytest.raises(ValueError):
        perturb_full_support(P, 1.0, seed=0)


# -- locking ----------------------------------------------------------------------


def test_locking_constant_u_is_tight():
    P3 = dirichlet_random((2, 2, 2), seed=9)
    lhs, rhs, slack = locking_check(constant_u_extension(P3))
    assert slack == pytest.approx(0.0, abs=1e-9)


def test_locking_slack_nonnegative_on_random_inputs():
    for k in range(5):
        P4 = dirichlet_random((2, 2, 2, 2), seed=60 + k)
        assert locking_check(P4)[2] >= -1e-6


# -- MMI bound and oracle ----------------------------------------------------------


def test_mmi_bound_sweep_small_sample():
    worst = mmi_bound_sweep(
        MEASURE_IDS, FamilySpec("dirichlet_random", {"shape": (2, 2, 2)}), trials=10
    )
    assert worst <= 1e-7


def test_broja_oracle_matches_solver_and_closed_forms():
    assert broja_oracle(xor()) == pytest.approx(0.0, abs=1e-9)
    assert broja_oracle(unq("y")) == pytest.approx(1.0, abs=1e-9)
    for seed in (70, 71, 72):
        P = dirichlet_random((2, 2, 2), seed=seed)
        assert ui_broja(P).ui_y == pytest.approx(broja_oracle(P, seed=seed), abs=1e-6)


def test_broja_oracle_requires_binary_alphabets():
    with pytest.raises(AssertionError):
        broja_oracle(dirichlet_random((3, 2, 2), seed=0))


# -- suites (smoke at small trial counts) --------------------------------------------


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suites_pass_at_small_trial_counts(suite):
    body, passed = SUITES[suite](trials=5, seed=0)
    assert passed, body
    assert body["passed"] is True
    assert body["trials"] == 5
