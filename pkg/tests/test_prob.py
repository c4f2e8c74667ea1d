"""Probability-core tests against definition-level (nested-sum) oracles."""

import itertools
import math

import numpy as np
import pytest

from isacmac import prob
from isacmac.errors import (
    ArgumentError,
    DegenerateEventError,
    UnknownVariableError,
)


def random_joint(rng, names, sizes):
    raw = rng.random(tuple(sizes))
    return prob.JointDist(names, raw / raw.sum())


# ---------------------------------------------------------------------------
# Definition-level oracles, written as plain nested sums over symbol tuples.
# ---------------------------------------------------------------------------

def oracle_marginal(d, keep):
    kept_axes = [i for i, n in enumerate(d.names) if n in keep]
    out = {}
    for idx in itertools.product(*[range(s) for s in d.sizes]):
        key = tuple(idx[i] for i in kept_axes)
        out[key] = out.get(key, 0.0) + float(d.probs[idx])
    return out


def oracle_condition(d, on):
    mass = 0.0
    kept_axes = [i for i, n in enumerate(d.names) if n not in on]
    out = {}
    for idx in itertools.product(*[range(s) for s in d.sizes]):
        if all(idx[d.axis(k)] == v for k, v in on.items()):
            mass += float(d.probs[idx])
            key = tuple(idx[i] for i in kept_axes)
            out[key] = out.get(key, 0.0) + float(d.probs[idx])
    return {k: v / mass for k, v in out.items()}


def oracle_entropy(d, of, given):
    sub = set(of) | set(given)
    m = oracle_marginal(d, sub)
    g = oracle_marginal(d, set(given)) if given else {(): 1.0}
    h_sub = -sum(p * math.log2(p) for p in m.values() if p > 0)
    h_g = -sum(p * math.log2(p) for p in g.values() if p > 0)
    return h_sub - h_g


def oracle_mi(d, a, b, given):
    """sum p(a,b,g) log p(a,b|g)/(p(a|g) p(b|g)) via joint marginals."""
    names_a, names_b, names_g = set(a), set(b), set(given)
    pabg = oracle_marginal(d, names_a | names_b | names_g)
    pag = oracle_marginal(d, names_a | names_g)
    pbg = oracle_marginal(d, names_b | names_g)
    pg = oracle_marginal(d, names_g) if names_g else {(): 1.0}

    def project(idx_names, idx, sub):
        return tuple(v for n, v in zip(idx_names, idx) if n in sub)

    order = [n for n in d.names if n in names_a | names_b | names_g]
    total = 0.0
    for idx, p in pabg.items():
        if p <= 0:
            continue
        ia = pag[project(order, idx, names_a | names_g)]
        ib = pbg[project(order, idx, names_b | names_g)]
        ig = pg[project(order, idx, names_g)]
        total += p * math.log2(p * ig / (ia * ib))
    return total


# ---------------------------------------------------------------------------
# marginalize / condition / chain
# ---------------------------------------------------------------------------

def test_marginalize_independent_bits():
    d = prob.product(prob.bernoulli("A", 0.5), prob.bernoulli("B", 0.5))
    m = prob.marginalize(d, {"A"})
    assert m.names == ("A",)
    np.testing.assert_allclose(m.probs, [0.5, 0.5])


def test_marginalize_identity():
    rng = np.random.default_rng(0)
    d = random_joint(rng, ("A", "B"), (2, 3))
    m = prob.marginalize(d, {"A", "B"})
    assert m == d


def test_marginalize_matches_oracle():
    rng = np.random.default_rng(1)
    d = random_joint(rng, ("A", "B", "C"), (2, 3, 2))
    m = prob.marginalize(d, {"A", "C"})
    want = oracle_marginal(d, {"A", "C"})
    for idx in itertools.product(range(2), range(2)):
        assert m.probs[idx] == pytest.approx(want[idx], abs=1e-12)


def test_marginalize_unknown_name():
    d = prob.bernoulli("A", 0.3)
    with pytest.raises(UnknownVariableError):
        prob.marginalize(d, {"Z"})


def test_condition_independent_pair():
    d = prob.product(prob.bernoulli("A", 0.5), prob.bernoulli("B", 0.2))
    c = prob.condition(d, {"A": 0})
    np.testing.assert_allclose(c.probs, [0.8, 0.2])


def test_condition_full_assignment_point_mass():
    d = prob.product(prob.bernoulli("A", 0.5), prob.bernoulli("B", 0.2))
    c = prob.condition(d, {"A": 0, "B": 1})
    assert c.probs.sum() == pytest.approx(1.0)
    assert c.probs.size == 1


def test_condition_matches_bayes_oracle():
    rng = np.random.default_rng(2)
    d = random_joint(rng, ("A", "B", "C"), (2, 2, 3))
    c = prob.condition(d, {"B": 1})
    want = oracle_condition(d, {"B": 1})
    for idx in itertools.product(range(2), range(3)):
        assert c.probs[idx] == pytest.approx(want[idx], abs=1e-12)


def test_condition_zero_probability_event():
    d = prob.JointDist(("A", "B"), np.array([[0.5, 0.5], [0.0, 0.0]]))
    with pytest.raises(DegenerateEventError):
        prob.condition(d, {"A": 1})


def test_chain_deterministic_copy():
    d = prob.bernoulli("S", 0.3)
    k = prob.deterministic_kernel(("S",), (2,), "Z", 2, lambda s: s)
    j = prob.chain(d, k)
    np.testing.assert_allclose(j.probs, [[0.7, 0.0], [0.0, 0.3]])


def test_chain_marginal_preserves_prior():
    rng = np.random.default_rng(3)
    d = random_joint(rng, ("A", "B"), (2, 3))
    raw = rng.random((3, 2, 2))
    k = prob.CondKernel(("B",), ("C", "D"), raw / raw.sum(axis=(1, 2), keepdims=True))
    j = prob.chain(d, k)
    m = prob.marginalize(j, {"A", "B"})
    np.testing.assert_allclose(m.probs, d.probs, atol=1e-12)


def test_chain_three_factor_product_oracle():
    # P(a) P(b|a) P(c|b) on 2x2x2 versus an explicit triple sum.
    pa = np.array([0.4, 0.6])
    pba = np.array([[0.9, 0.1], [0.2, 0.8]])
    pcb = np.array([[0.5, 0.5], [0.25, 0.75]])
    d = prob.JointDist(("A",), pa)
    d = prob.chain(d, prob.CondKernel(("A",), ("B",), pba))
    d = prob.chain(d, prob.CondKernel(("B",), ("C",), pcb))
    for a, b, c in itertools.product(range(2), repeat=3):
        assert d.probs[a, b, c] == pytest.approx(pa[a] * pba[a, b] * pcb[b, c], abs=1e-15)


def test_chain_name_collision():
    d = prob.product(prob.bernoulli("S", 0.3), prob.bernoulli("T", 0.5))
    k = prob.deterministic_kernel(("S",), (2,), "T", 2, lambda s: s)
    with pytest.raises(UnknownVariableError):
        prob.chain(d, k)


# ---------------------------------------------------------------------------
# entropy / mutual information
# ---------------------------------------------------------------------------

def test_entropy_fair_bit():
    assert prob.entropy(prob.bernoulli("A", 0.5), {"A"}) == pytest.approx(1.0)


def test_entropy_h011_near_half():
    # the example channels use state bias 0.11, whose entropy is ~0.5 bit
    assert prob.entropy(prob.bernoulli("A", 0.11), {"A"}) == pytest.approx(0.5, abs=1e-3)


def test_one_minus_h024_constant():
    assert 1.0 - prob.binary_entropy(0.24) == pytest.approx(0.204959720615478, abs=1e-12)


def test_mi_independent_is_zero():
    d = prob.product(prob.bernoulli("X", 0.3), prob.bernoulli("Y", 0.7))
    assert prob.mutual_info(d, {"X"}, {"Y"}) == 0.0


def test_mi_gated_channel_constant():
    # X ~ Bern(0.4), B ~ Bern(0.5), Z = B*X: I(X;Z) has a known closed value.
    d = prob.product(prob.bernoulli("X", 0.4), prob.bernoulli("B", 0.5))
    k = prob.deterministic_kernel(("X", "B"), (2, 2), "Z", 2, lambda x, b: x * b)
    j = prob.chain(d, k)
    assert prob.mutual_info(j, {"X"}, {"Z"}) == pytest.approx(
        0.321928094887362, abs=1e-12
    )


def test_mi_matches_definition_oracle():
    rng = np.random.default_rng(4)
    d = random_joint(rng, ("A", "B", "C", "D"), (2, 2, 2, 3))
    got = prob.mutual_info(d, {"A"}, {"B", "C"}, {"D"})
    assert got == pytest.approx(oracle_mi(d, {"A"}, {"B", "C"}, {"D"}), abs=1e-10)


def test_entropy_matches_oracle_randomized():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = random_joint(rng, ("A", "B", "C"), (2, 3, 2))
        assert prob.entropy(d, {"A"}, {"C"}) == pytest.approx(
            oracle_entropy(d, {"A"}, {"C"}), abs=1e-10
        )


def test_chain_rule_property():
    rng = np.random.default_rng(6)
    for _ in range(200):
        sizes = tuple(rng.integers(2, 4, size=3))
        d = random_joint(rng, ("A", "B", "C"), sizes)
        lhs = prob.entropy(d, {"A", "B"}, {"C"})
        rhs = prob.entropy(d, {"A"}, {"C"}) + prob.entropy(d, {"B"}, {"A", "C"})
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_nonnegativity_property():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = random_joint(rng, ("A", "B"), (3, 3))
        assert prob.entropy(d, {"A"}, {"B"}) >= 0.0
        assert prob.mutual_info(d, {"A"}, {"B"}) >= 0.0


def test_data_processing_on_assembled_chain():
    rng = np.random.default_rng(8)
    for _ in range(200):
        pa = rng.random(2)
        d = prob.JointDist(("A",), pa / pa.sum())
        kb = rng.random((2, 3))
        d = prob.chain(d, prob.CondKernel(("A",), ("B",), kb / kb.sum(1, keepdims=True)))
        kc = rng.random((3, 2))
        d = prob.chain(d, prob.CondKernel(("B",), ("C",), kc / kc.sum(1, keepdims=True)))
        assert prob.mutual_info(d, {"A"}, {"C"}) <= prob.mutual_info(d, {"A"}, {"B"}) + 1e-10


def test_mi_disjointness_enforced():
    d = prob.product(prob.bernoulli("A", 0.5), prob.bernoulli("B", 0.5))
    with pytest.raises(ArgumentError):
        prob.mutual_info(d, {"A"}, {"A", "B"})


def test_singleton_variable_is_inert():
    d = prob.product(prob.bernoulli("A", 0.3), prob.singleton("PHI"))
    assert prob.entropy(d, {"PHI"}) == 0.0
    assert prob.mutual_info(d, {"A"}, {"PHI"}) == 0.0
    assert prob.entropy(d, {"A"}, {"PHI"}) == pytest.approx(
        prob.entropy(d, {"A"}), abs=1e-15
    )
