"""Example-channel construction, joint assembly, and golden snapshots."""

import hashlib
import itertools

import numpy as np
import pytest

from isacmac import prob
from isacmac.channels import (
    assemble_joint,
    build_example,
    expand_derived,
    state_bit_marginal,
    uniform_inputs,
)
from isacmac.errors import ArgumentError, SchemaError


def test_build_example_rejects_out_of_range():
    for bad in (0, 5, -1):
        with pytest.raises(ArgumentError):
            build_example(bad)


def test_example4_noise_bias():
    ch = build_example(4)
    assert state_bit_marginal(ch, "N") == pytest.approx(0.3, abs=1e-15)
    assert state_bit_marginal(ch, "S1") == pytest.approx(0.24, abs=1e-15)
    assert state_bit_marginal(ch, "S2") == pytest.approx(0.05, abs=1e-15)
    assert state_bit_marginal(ch, "B") == pytest.approx(0.5, abs=1e-15)


def test_example1_feedback_is_x1_xor_s2():
    ch = build_example(1)
    s2 = ch.derived["S2"].table
    kern = ch.kernel.probs
    for x1, x2, s in itertools.product(range(2), range(2), range(4)):
        z1 = np.flatnonzero(kern[x1, x2, s].sum(axis=(0, 2)))
        assert z1.size == 1 and z1[0] == x1 ^ s2[s]


def test_example3_output_is_ternary():
    ch = build_example(3)
    assert ch.alphabets["Y"] == 3


def test_example1_output_noise_entropy():
    # with product inputs, H(Y|X1,X2) = H(S1) + H(S2) ~ 1 bit
    ch = build_example(1)
    j = assemble_joint(ch, uniform_inputs(ch))
    got = prob.entropy(j, {"Y"}, {"X1", "X2"})
    want = 2 * prob.binary_entropy(0.11)
    assert got == pytest.approx(want, abs=1e-12)
    assert got == pytest.approx(1.0, abs=1e-3)


def test_assemble_point_mass_input():
    ch = build_example(1)
    inp = prob.product(
        prob.JointDist(("X1",), np.array([1.0, 0.0])),
        prob.JointDist(("X2",), np.array([0.0, 1.0])),
    )
    j = assemble_joint(ch, inp)
    m = prob.marginalize(j, {"X1", "X2"})
    np.testing.assert_allclose(m.probs, [[0, 1], [0, 0]], atol=0)
    # the state marginal is untouched by the inputs
    sm = prob.marginalize(j, {"S", "ST1", "ST2", "SR"})
    np.testing.assert_allclose(sm.probs, ch.state.probs, atol=1e-15)


def test_assemble_kernel_slice_consistency():
    ch = build_example(2)
    j = assemble_joint(ch, uniform_inputs(ch))
    pj = prob.marginalize(j, {"X1", "X2", "S", "Y", "Z1", "Z2"})
    perm = [pj.names.index(n) for n in ("X1", "X2", "S", "Y", "Z1", "Z2")]
    t = np.transpose(pj.probs, perm)
    cond_mass = t.sum(axis=(3, 4, 5), keepdims=True)
    ok = cond_mass[..., 0, 0, 0] > 0
    ratio = np.where(cond_mass > 0, t / np.where(cond_mass > 0, cond_mass, 1), 0)
    np.testing.assert_allclose(ratio[ok], ch.kernel.probs[ok], atol=1e-12)


def test_example4_uniform_iy_matches_bruteforce():
    ch = build_example(4)
    j = assemble_joint(ch, uniform_inputs(ch))
    got = prob.mutual_info(j, {"X1", "X2"}, {"Y"})

    # direct sum over (x1, x2, s1, s2): Y = (x1^s1, x2^s2)
    import math

    py = {}
    pxy = {}
    biases = {"S1": 0.24, "S2": 0.05}
    for x1, x2, s1, s2 in itertools.product(range(2), repeat=4):
        p = 0.25
        p *= biases["S1"] if s1 else 1 - biases["S1"]
        p *= biases["S2"] if s2 else 1 - biases["S2"]
        y = (x1 ^ s1, x2 ^ s2)
        py[y] = py.get(y, 0.0) + p
        pxy[(x1, x2, y)] = pxy.get((x1, x2, y), 0.0) + p
    want = sum(
        p * math.log2(p / (0.25 * py[(k[2])]))
        for k, p in pxy.items()
        if p > 0
    )
    assert got == pytest.approx(want, abs=1e-10)


def test_assemble_rejects_alien_inputs():
    ch = build_example(1)
    with pytest.raises(SchemaError):
        assemble_joint(ch, prob.bernoulli("X1", 0.5))  # missing X2
    bad = prob.product(
        prob.JointDist(("X1",), np.ones(3) / 3), prob.bernoulli("X2", 0.5)
    )
    with pytest.raises(SchemaError):
        assemble_joint(ch, bad)


def test_derived_variables_consistent():
    ch = build_example(4)
    j = expand_derived(ch, assemble_joint(ch, uniform_inputs(ch)))
    # BX1 really is the first component of Z2, i.e. B*X1
    for b, x1 in itertools.product(range(2), range(2)):
        c = prob.condition(j, {"B": b, "X1": x1})
        bx = prob.marginalize(c, {"BX1"}).probs
        assert bx[b * x1] == pytest.approx(1.0, abs=1e-12)


def test_gated_constant_via_example4():
    ch = build_example(4)
    j = expand_derived(ch, assemble_joint(ch, uniform_inputs(ch, p1=0.4)))
    got = prob.mutual_info(j, {"X1"}, {"BX1"})
    assert got == pytest.approx(0.321928094887362, abs=1e-12)


GOLDEN = {
    1: "7ab45df9cc3d2ea9c72c982d0ddbb310",
    2: "fb022d0227447b1272bce192c53dc2a3",
    3: "cb822e4ce0f2cc82a455a75b7193937d",
    4: "15ebc03322e309ba99d5aa05676be2a9",
}


def _digest(ch):
    h = hashlib.md5()
    h.update(np.ascontiguousarray(ch.state.probs).tobytes())
    h.update(np.ascontiguousarray(ch.kernel.probs).tobytes())
    h.update(np.ascontiguousarray(ch.d1.table).tobytes())
    h.update(np.ascontiguousarray(ch.d2.table).tobytes())
    return h.hexdigest()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_golden_tensor_snapshot(n):
    assert _digest(build_example(n)) == GOLDEN[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_assembled_joint_passes_invariants(n):
    # any input law yields a valid joint: nonnegative, normalized, consistent
    ch = build_example(n)
    rng = np.random.default_rng(40 + n)
    for _ in range(5):
        j = assemble_joint(ch, uniform_inputs(ch, p1=rng.random(), p2=rng.random()))
        assert j.probs.min() >= 0.0
        assert abs(j.probs.sum() - 1.0) < 1e-12
        prob.JointDist(j.names, j.probs)  # re-validate explicitly
