"""Inner-region evaluators: certified points, reductions, and properties."""

import numpy as np
import pytest

from isacmac import prob
from isacmac.channels import build_example
from isacmac.inner import (
    Example4Grid,
    Example4Params,
    RegionPoint,
    binary_xor_scheme,
    eval_inner_awk,
    eval_inner_our,
    example1_scheme,
    example2_scheme,
    example4_scheme,
    pareto_frontier,
    random_common_scheme,
    scheme_joint,
    sweep_example12,
    sweep_example4,
    to_common_compression,
)
from isacmac.errors import ArgumentError


# ---------------------------------------------------------------------------
# certified example points
# ---------------------------------------------------------------------------

def test_example1_private_description_reaches_r2_one():
    ch = build_example(1)
    scheme = example1_scheme("our", 0.5, 0.5, 0.5, 0.5, 0.5, channel=ch)
    poly, d1, d2 = eval_inner_our(ch, scheme)
    assert poly.feasible
    assert poly.contains(0.0, 1.0)
    assert d1 == pytest.approx(0.0, abs=1e-12)
    assert d2 == pytest.approx(0.0, abs=1e-12)


def test_example1_awk_cannot_carry_the_description():
    # the same description sent as common information violates its own
    # decodability constraint for every parameter choice
    ch = build_example(1)
    rng = np.random.default_rng(31)
    for _ in range(20):
        pu, ps1, ps2, pt1, pt2 = rng.random(5)
        poly, _, _ = eval_inner_awk(
            ch, example1_scheme("awk", pu, ps1, ps2, pt1, pt2, channel=ch)
        )
        assert not poly.feasible
        assert min(poly.slack["common1"], poly.slack["common2"]) < -1e-6


def test_example2_common_description_reaches_zero_distortion():
    ch = build_example(2)
    scheme = example2_scheme("our", 0.0, 0.5, 0.0, 0.0, 0.5, channel=ch)
    poly, d1, d2 = eval_inner_our(ch, scheme)
    assert poly.feasible
    assert poly.contains(0.0, 0.0)
    assert d1 == pytest.approx(0.0, abs=1e-12)
    assert d2 == pytest.approx(0.0, abs=1e-12)


def test_example4_split_corner_point():
    ch = build_example(4)
    scheme = example4_scheme("our", 0.0, 0.0, 0.0, 0.5, 0.5, p_e=0.3, channel=ch)
    poly, d1, d2 = eval_inner_our(ch, scheme)
    assert poly.feasible
    want = 2.0 - prob.binary_entropy(0.24) - prob.binary_entropy(0.05)
    assert poly.r1 == pytest.approx(want, abs=1e-12)
    assert poly.contains(want, 0.0)
    assert d1 == pytest.approx(0.0, abs=1e-12)
    assert d2 == pytest.approx(0.3, abs=1e-12)


def test_example4_quantizer_rate_identity():
    # the common description costs I(V;N) = h(P_N) - h(p_e) on this channel
    ch = build_example(4)
    h = prob.binary_entropy
    for p_e in (0.05, 0.131, 0.179, 0.25):
        scheme = example4_scheme("our-com", 0.0, 0.4, 0.0, 0.0, 0.5, p_e=p_e, channel=ch)
        poly, _, d2 = eval_inner_our(ch, scheme)
        cost = poly.slack["r1"] - poly.slack["common1"]  # min-branch is zero here
        assert poly.slack["common1"] == pytest.approx(
            0.321928094887362 - (h(0.3) - h(p_e)), abs=1e-12
        )
        assert d2 == pytest.approx(p_e, abs=1e-12)
        assert cost == pytest.approx(0.0, abs=1e-12)


def test_example4_params_validation():
    with pytest.raises(ArgumentError):
        Example4Params(0.5, 0.5, 0.5, 0.5, 0.5, p_e=0.31)
    with pytest.raises(ArgumentError):
        Example4Params(1.5, 0.5, 0.5, 0.5, 0.5, p_e=0.1)


# ---------------------------------------------------------------------------
# structural reductions and inclusions
# ---------------------------------------------------------------------------

def test_no_compression_reduction_matches():
    # with every description absent the two formula sets agree exactly
    ch = build_example(4)
    rng = np.random.default_rng(32)
    for _ in range(25):
        pu, ps1, ps2, pt1, pt2 = rng.random(5)
        p_our, d1o, d2o = eval_inner_our(
            ch, binary_xor_scheme("our", pu, ps1, ps2, pt1, pt2)
        )
        p_awk, d1a, d2a = eval_inner_awk(
            ch, binary_xor_scheme("awk", pu, ps1, ps2, pt1, pt2)
        )
        assert p_our.r1 == pytest.approx(p_awk.r1, abs=1e-9)
        assert p_our.r2 == pytest.approx(p_awk.r2, abs=1e-9)
        assert p_our.sum12[0] == pytest.approx(p_awk.sum12[0], abs=1e-9)
        assert p_our.sum12[1] == pytest.approx(p_awk.sum12[1], abs=1e-9)
        assert p_our.feasible and p_awk.feasible
        assert d1o == pytest.approx(d1a, abs=1e-12)
        assert d2o == pytest.approx(d2a, abs=1e-12)


def test_common_mapping_inclusion_random_schemes():
    # mapping Vk -> common part: bounds dominate, feasibility transfers,
    # distortions match; checked on 100 random schemes
    ch = build_example(4)
    rng = np.random.default_rng(2024)
    n_feasible = 0
    for _ in range(100):
        awk = random_common_scheme(ch, rng)
        p_a, da1, da2 = eval_inner_awk(ch, awk)
        p_o, do1, do2 = eval_inner_our(ch, to_common_compression(awk))
        assert p_a.r1 <= p_o.r1 + 1e-9
        assert p_a.r2 <= p_o.r2 + 1e-9
        assert p_a.sum12[0] <= p_o.sum12[0] + 1e-9
        assert p_a.sum12[1] <= p_o.sum12[1] + 1e-9
        if p_a.feasible:
            n_feasible += 1
            assert p_o.feasible
            assert da1 == pytest.approx(do1, abs=1e-9)
            assert da2 == pytest.approx(do2, abs=1e-9)
    assert n_feasible >= 20  # the property must not hold vacuously


def test_terms_reproducible_from_assembled_joint():
    # region constants recompute from the full joint via the generic API
    ch = build_example(4)
    scheme = example4_scheme("our", 0.0, 0.4, 0.25, 0.1, 0.5, p_e=0.2, channel=ch)
    poly, _, _ = eval_inner_our(ch, scheme)
    j = scheme_joint(ch, scheme)
    a1 = prob.mutual_info(j, {"U1"}, {"Z2"}, {"U", "U2", "X2"})
    b1 = prob.mutual_info(
        j, {"V1c"}, {"X1", "Z1"}, {"U", "U1", "U2", "X2", "Z2"}
    )
    assert poly.slack["common1"] == pytest.approx(a1 - b1, abs=1e-11)
    sum_all = (
        prob.mutual_info(j, {"X1", "X2"}, {"Y", "SR"})
        - prob.mutual_info(
            j, {"V1c"}, {"Z1"}, {"U", "U1", "U2", "X1", "X2", "Y", "SR"}
        )
        - prob.mutual_info(
            j, {"V2p"}, {"Z2"},
            {"U", "U1", "U2", "X1", "X2", "Y", "SR", "V1c"},
        )
    )
    assert poly.slack["sum_all"] == pytest.approx(sum_all, abs=1e-11)


def test_example2_output_noise_kills_direct_rate():
    # the first output component is noise-saturated: I(X1;Y|U,X2) = 0 for
    # any scheme in the family
    ch = build_example(2)
    rng = np.random.default_rng(33)
    for _ in range(10):
        pu, ps1, ps2, pt1, pt2 = rng.random(5)
        scheme = example2_scheme("our", pu, ps1, ps2, pt1, pt2, channel=ch)
        j = scheme_joint(ch, scheme)
        assert prob.mutual_info(j, {"X1"}, {"Y"}, {"U", "X2"}) <= 1e-9


# ---------------------------------------------------------------------------
# pareto frontier
# ---------------------------------------------------------------------------

def _pt(r1, r2, d1, d2):
    return RegionPoint(r1, r2, d1, d2, "t")


def test_pareto_single_point():
    p = _pt(0.1, 0.2, 0.0, 0.1)
    assert pareto_frontier([p]) == [p]


def test_pareto_dominated_pair():
    a = _pt(0.5, 0.5, 0.0, 0.1)
    b = _pt(0.4, 0.5, 0.0, 0.2)
    assert pareto_frontier([a, b]) == [a]


def test_pareto_matches_quadratic_oracle():
    rng = np.random.default_rng(34)
    pts = [
        _pt(*np.round(rng.random(4), 2))
        for _ in range(120)
    ]
    got = set(p.key() for p in pareto_frontier(pts))

    def dominated(p, q):
        ge = (
            q.r1 >= p.r1 and q.r2 >= p.r2 and q.d1 <= p.d1 and q.d2 <= p.d2
        )
        strict = (
            q.r1 > p.r1 or q.r2 > p.r2 or q.d1 < p.d1 or q.d2 < p.d2
        )
        return ge and strict

    want = set(
        p.key() for p in pts if not any(dominated(p, q) for q in pts)
    )
    assert got == want


# ---------------------------------------------------------------------------
# small sweeps
# ---------------------------------------------------------------------------

def test_mini_sweep_example4_contains_corner():
    grid = Example4Grid(
        p_u=(0.0,), p_s1=(0.0, 0.4), p_s2=(0.0,), p_t1=(0.0, 0.5),
        p_t2=(0.5,), p_e=(0.15, 0.3), zoom=1,
    )
    res = sweep_example4(grid=grid, processes=1)
    want = 2.0 - prob.binary_entropy(0.24) - prob.binary_entropy(0.05)
    ours = res["our"].frontier()
    assert any(
        abs(p.r1 - want) < 1e-9 and p.r2 == 0.0 and abs(p.d2 - 0.3) < 1e-12
        for p in ours
    )
    # determinism: the same grid reproduces the same records
    res2 = sweep_example4(grid=grid, processes=1)
    assert res2["our"].records == res["our"].records


def test_mini_sweep_example1_awk_family_infeasible():
    from isacmac.inner import Example12Grid

    grid = Example12Grid(
        p_u=(0.0, 0.5), p_s1=(0.0, 0.5), p_s2=(0.0, 0.5),
        p_t1=(0.0, 0.5), p_t2=(0.0, 0.5),
    )
    res = sweep_example12(1, "awk", grid=grid, processes=1)
    assert res.records and not any(r.feasible for r in res.records)
    assert res.max_feasible_rate(2) == 0.0
