"""Tests for the joint-distribution core and Shannon functionals."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pidlab.dist import (
    Alphabet,
    JointDist,
    combine_variables,
    conditional,
    conditional_mutual_information,
    entropy,
    full_support,
    kl_divergence,
    l1_distance,
    marginal,
    mutual_information,
    product_alphabet,
    tensor_product,
    validate,
)
from pidlab.errors import (
    NegativeMass,
    NotNormalized,
    OverlappingGroups,
    PairingIncomplete,
    ShapeMismatch,
    UnknownVariable,
)


def bit():
    return Alphabet(("0", "1"))


def uniform(shape, names=("S", "Y", "Z")):
    alphabets = tuple(Alphabet(tuple(str(i) for i in range(k))) for k in shape)
    return JointDist(names[: len(shape)], alphabets, np.full(shape, 1.0 / np.prod(shape)))


def random_dist(shape, seed=0, names=("S", "Y", "Z", "U")):
    rng = np.random.default_rng(seed)
    mass = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    alphabets = tuple(Alphabet(tuple(str(i) for i in range(k))) for k in shape)
    return validate(JointDist(names[: len(shape)], alphabets, mass))


# -- construction and validation -------------------------------------------


def test_alphabet_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(())


def test_alphabet_index():
    a = Alphabet(("x", "y"))
    assert a.index("y") == 1
    with pytest.raises(KeyError):
        a.index("z")


def test_product_alphabet_labels():
    a = product_alphabet(Alphabet(("0", "1")), Alphabet(("a", "b")))
    assert a.labels == ("(0,a)", "(0,b)", "(1,a)", "(1,b)")


def test_jointdist_shape_checks():
    with pytest.raises(ShapeMismatch):
        JointDist(("S",), (bit(),), np.zeros(3))
    with pytest.raises(ValueError):
        JointDist(("S", "S"), (bit(), bit()), np.zeros((2, 2)))


def test_jointdist_mass_is_read_only():
    P = uniform((2, 2))
    with pytest.raises(ValueError):
        P.mass[0, 0] = 1.0


def test_validate_rejects_negative_and_unnormalized():
    with pytest.raises(NegativeMass):
        validate(JointDist(("S",), (bit(),), np.array([1.1, -0.1])))
    with pytest.raises(NotNormalized):
        validate(JointDist(("S",), (bit(),), np.array([0.7, 0.7])))


def test_validate_clamps_dust_and_renormalizes():
    P = validate(JointDist(("S",), (bit(),), np.array([1.0 - 1e-16, 1e-16])))
    assert P.mass[1] == 0.0
    assert P.mass.sum() == 1.0


def test_axis_unknown_variable():
    P = uniform((2, 2))
    with pytest.raises(UnknownVariable):
        P.axis("Q")


# -- marginals and conditionals ---------------------------------------------


def test_marginal_preserves_order_and_mass():
    P = random_dist((2, 3, 2), seed=1)
    M = marginal(P, ["Z", "S"])  # order in P is restored
    assert M.names == ("S", "Z")
    np.testing.assert_allclose(M.mass.sum(), 1.0, atol=1e-12)
    np.testing.assert_allclose(M.mass, P.mass.sum(axis=1))


def test_conditional_rows_normalized_and_support_only():
    P = validate(
        JointDist(("S", "Y"), (bit(), bit()), np.array([[0.5, 0.5], [0.0, 0.0]]))
    )
    ch = conditional(P, target="Y", given="S")
    assert set(ch.rows) == {"0"}
    np.testing.assert_allclose(ch.row("0").sum(), 1.0)


# -- information quantities --------------------------------------------------


def test_entropy_uniform():
    assert entropy(uniform((2, 2))) == pytest.approx(2.0, abs=1e-12)
    assert entropy(uniform((2, 2)), ["S"]) == pytest.approx(1.0, abs=1e-12)


def test_mutual_information_independent_and_copy():
    P = uniform((2, 2), names=("S", "Y"))
    assert mutual_information(P, ["S"], ["Y"]) == pytest.approx(0.0, abs=1e-12)
    copy = validate(JointDist(("S", "Y"), (bit(), bit()), np.diag([0.5, 0.5])))
    assert mutual_information(copy, ["S"], ["Y"]) == pytest.approx(1.0, abs=1e-12)


def test_cmi_rejects_overlap_and_empty():
    P = random_dist((2, 2, 2))
    with pytest.raises(OverlappingGroups):
        conditional_mutual_information(P, ["S"], ["S"], [])
    with pytest.raises(OverlappingGroups):
        conditional_mutual_information(P, [], ["S"], [])


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_chain_rule(seed):
    P = random_dist((2, 2, 2), seed=seed)
    lhs = mutual_information(P, ["S"], ["Y", "Z"])
    rhs = conditional_mutual_information(P, ["S"], ["Y"], ["Z"]) + mutual_information(
        P, ["S"], ["Z"]
    )
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_cmi_swap_identity(seed):
    # I(S;Y|Z) - I(S;Z|Y) = I(S;Y) - I(S;Z)
    P = random_dist((2, 3, 2), seed=seed)
    lhs = conditional_mutual_information(P, ["S"], ["Y"], ["Z"]) - (
        conditional_mutual_information(P, ["S"], ["Z"], ["Y"])
    )
    rhs = mutual_information(P, ["S"], ["Y"]) - mutual_information(P, ["S"], ["Z"])
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_kl_divergence_basics():
    p = np.array([0.5, 0.5])
    q = np.array([0.25, 0.75])
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-15)
    assert kl_divergence(p, q) > 0
    assert kl_divergence(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == float("inf")
    with pytest.raises(ShapeMismatch):
        kl_divergence(np.zeros(2), np.zeros(3))


def test_kl_zero_iff_equal_on_full_support():
    P = random_dist((2, 2), seed=3, names=("S", "Y"))
    Q = random_dist((2, 2), seed=4, names=("S", "Y"))
    assert kl_divergence(P, P) == pytest.approx(0.0, abs=1e-12)
    assert l1_distance(P, Q) > 0
    assert kl_divergence(P, Q) > 1e-10


# -- products and merges ------------------------------------------------------


def test_tensor_product_entropy_additivity():
    P1 = random_dist((2, 2, 2), seed=5)
    P2 = random_dist((2, 2, 2), seed=6)
    prod = tensor_product(P1, P2, [("S", "S", "S"), ("Y", "Y", "Y"), ("Z", "Z", "Z")])
    assert entropy(prod) == pytest.approx(entropy(P1) + entropy(P2), abs=1e-10)


def test_tensor_product_marginals_recover_factors():
    P1 = random_dist((2, 2, 2), seed=7)
    P2 = random_dist((2, 2, 2), seed=8)
    prod = tensor_product(P1, P2, [("S", "S", "S"), ("Y", "Y", "Y"), ("Z", "Z", "Z")])
    # Sum over the second factor's indices inside each composite axis.
    m = prod.mass.reshape(2, 2, 2, 2, 2, 2).sum(axis=(1, 3, 5))
    np.testing.assert_allclose(m, P1.mass, atol=1e-15)
    m = prod.mass.reshape(2, 2, 2, 2, 2, 2).sum(axis=(0, 2, 4))
    np.testing.assert_allclose(m, P2.mass, atol=1e-15)


def test_tensor_product_pairing_must_cover():
    P1 = random_dist((2, 2, 2), seed=1)
    P2 = random_dist((2, 2, 2), seed=2)
    with pytest.raises(PairingIncomplete):
        tensor_product(P1, P2, [("S", "S", "S"), ("Y", "Y", "Y")])


def test_combine_variables_entropy_invariant():
    P = random_dist((2, 2, 2, 2), seed=9, names=("S", "Y", "Z", "U"))
    M = combine_variables(P, ["Z", "U"], "W")
    assert M.names == ("S", "Y", "W")
    assert len(M.alphabet("W")) == 4
    assert entropy(M) == pytest.approx(entropy(P), abs=1e-12)
    assert mutual_information(M, ["S"], ["W"]) == pytest.approx(
        mutual_information(P, ["S"], ["Z", "U"]), abs=1e-10
    )


def test_full_support():
    assert full_support(uniform((2, 2)))
    P = validate(JointDist(("S", "Y"), (bit(), bit()), np.array([[0.5, 0.5], [0.0, 0.0]])))
    assert not full_support(P)
