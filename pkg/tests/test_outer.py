"""Outer-bound evaluators: analytic anchors, subset property, closed forms."""

import math

import numpy as np
import pytest

from isacmac import prob
from isacmac.channels import build_example
from isacmac.errors import ArgumentError
from isacmac.inner import TermEngine
from isacmac.outer import (
    AlphaParams,
    alphas_of_scheme,
    composite_omega,
    eval_outer_khkc,
    example4_outer_closed_form,
    khkc_feasible,
    make_f2_rd_pc,
    min_distortion_our,
    our_feasible,
    outer_joint,
    outer_scheme_grid,
    parallel_f2_problem,
    reduced_f2_problem,
    sensing_caps,
    sweep_example4_outer,
)
from isacmac.rd import rd_function

h = prob.binary_entropy


def small_grid(channel, levels=(0.0, 0.5, 1.0)):
    return outer_scheme_grid(channel, kappas=(0.5,), levels=levels)


# ---------------------------------------------------------------------------
# composite map
# ---------------------------------------------------------------------------

def test_omega_endpoints_and_domain():
    assert composite_omega(0.0) == 0.0
    assert composite_omega(0.5) == 0.5
    with pytest.raises(ArgumentError):
        composite_omega(1.5)
    with pytest.raises(ArgumentError):
        composite_omega(-0.1)


def test_omega_entropy_identity_grid():
    t = np.linspace(0.0, 1.0, 1001)
    lhs = h(composite_omega(2 * t * (1 - t)))
    assert np.max(np.abs(lhs - h(t))) < 1e-12


def test_omega_min_identity():
    t = np.linspace(0.0, 1.0, 101)
    np.testing.assert_allclose(
        composite_omega(2 * t * (1 - t)), np.minimum(t, 1 - t), atol=1e-14
    )


# ---------------------------------------------------------------------------
# generic evaluations
# ---------------------------------------------------------------------------

def test_product_schemes_pass_dependence_balance():
    ch = build_example(4)
    for s in small_grid(ch)[:8]:
        poly, _, _ = eval_outer_khkc(ch, s)
        assert poly.slack["dep_balance"] >= -1e-9


def test_example3_sensing_cap_is_zero():
    # the own echo mod the input is pure own-state: nothing flows across
    ch = build_example(3)
    for s in small_grid(ch)[:6]:
        eng = TermEngine(outer_joint(ch, s))
        for k in (1, 2):
            c_echo, _ = sensing_caps(eng, k)
            assert c_echo <= 1e-9


def test_example3_min_distortions():
    ch = build_example(3)
    d1 = [min_distortion_our(ch, s, 1) for s in small_grid(ch, (0.0, 0.5))[:6]]
    d2 = [min_distortion_our(ch, s, 2) for s in small_grid(ch, (0.0, 0.5))[:6]]
    assert min(d1) == pytest.approx(0.11, abs=1e-6)
    assert min(d2) == pytest.approx(0.11, abs=1e-6)


def test_example3_genie_distortions_zero():
    ch = build_example(3)
    for s in small_grid(ch)[:6]:
        _, g1, g2 = eval_outer_khkc(ch, s)
        assert g1 == pytest.approx(0.0, abs=1e-12)
        assert g2 == pytest.approx(0.0, abs=1e-12)


def test_example1_genie_distortions_zero():
    ch = build_example(1)
    s = small_grid(ch)[4]
    _, g1, g2 = eval_outer_khkc(ch, s)
    assert g1 == 0.0 and g2 == 0.0


def test_subset_property_with_strict_gap():
    # rate-limited feasibility implies genie feasibility scheme by scheme;
    # the converse fails at the zero-distortion corner
    ch = build_example(4)
    witness = False
    for s in small_grid(ch):
        for d2 in (0.0, 0.15, 0.3):
            ours = our_feasible(ch, s, 0.0, 0.0, 0.0, d2)
            genie = khkc_feasible(ch, s, 0.0, 0.0, 0.0, d2)
            if ours:
                assert genie
            if genie and not ours:
                witness = True
    assert witness


def test_random_channel_genie_dominates_restricted():
    ch = build_example(4)
    s = small_grid(ch)[7]
    joint = outer_joint(ch, s)
    from isacmac.estimator import expected_distortion, optimal_estimator

    for k in (1, 2):
        d = ch.d1 if k == 1 else ch.d2
        genie = expected_distortion(
            joint, optimal_estimator(joint, ("X1", "X2", "Z1", "Z2"), f"ST{k}", d),
            f"ST{k}", d,
        )
        own = expected_distortion(
            joint, optimal_estimator(joint, (f"X{k}", f"Z{k}"), f"ST{k}", d),
            f"ST{k}", d,
        )
        assert genie <= own + 1e-10


# ---------------------------------------------------------------------------
# closed-form bounds
# ---------------------------------------------------------------------------

def test_closed_form_saturates_at_quarter():
    ch = build_example(4)
    f2 = make_f2_rd_pc(ch)
    r1, r2, _, _ = example4_outer_closed_form(
        AlphaParams(0.25, 0.25, 0.5), 0.3, f2, ch
    )
    assert r1 == pytest.approx(1.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_closed_form_alpha_one_kills_cooperation():
    ch = build_example(4)
    f2 = make_f2_rd_pc(ch)
    _, _, _, slack = example4_outer_closed_form(
        AlphaParams(0.0, 0.0, 1.0), 0.3, f2, ch
    )
    # the cooperative term vanishes; the budget at the distortion bound is 0
    assert slack == pytest.approx(0.0, abs=1e-12)


def test_closed_form_infeasible_at_zero_distortion():
    ch = build_example(4)
    f2 = make_f2_rd_pc(ch)
    for alpha in np.linspace(0, 1, 41):
        _, _, _, slack = example4_outer_closed_form(
            AlphaParams(0.25, 0.25, float(alpha)), 0.0, f2, ch
        )
        assert slack < -1e-6


def test_generic_never_exceeds_closed_form():
    ch = build_example(4)
    f2 = make_f2_rd_pc(ch)
    for s in outer_scheme_grid(ch, kappas=(0.5, 0.3), levels=(0.0, 0.25, 0.5))[:40]:
        al = alphas_of_scheme(s)
        r1m, r2m, rsum, _ = example4_outer_closed_form(al, 0.3, f2, ch)
        eng = TermEngine(outer_joint(ch, s))
        assert eng.I(("X1",), ("Y", "Z1", "Z2"), ("SR", "X2", "T")) <= r1m + 1e-9
        assert eng.I(("X2",), ("Y", "Z1", "Z2"), ("SR", "X1", "T")) <= r2m + 1e-9
        assert eng.I(("X1", "X2"), ("Y",), ("SR",)) <= rsum + 1e-9
        c_echo, c_pair = sensing_caps(eng, 2)
        coop = h(0.5 * (1 - al.alpha)) - (1 - al.alpha)
        assert c_echo <= coop + 1e-9
        assert c_pair <= h(0.3) + 1e-9


def test_parallel_reduction_matches_full_conditioning():
    ch = build_example(4)
    reduced = reduced_f2_problem(ch)
    full = parallel_f2_problem(ch)
    for D in (0.0, 0.1, 0.2, 0.3):
        assert rd_function(full, D) == pytest.approx(
            rd_function(reduced, D), abs=1e-6
        )


def test_alpha_params_domain():
    with pytest.raises(ArgumentError):
        AlphaParams(0.3, 0.1, 0.5)
    with pytest.raises(ArgumentError):
        AlphaParams(0.1, 0.1, 1.5)


# ---------------------------------------------------------------------------
# symmetric-rate curves
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def curves():
    return sweep_example4_outer(channel=build_example(4))


def test_curve_ordering(curves):
    ours, genie = curves["our"], curves["khkc"]
    for a, b in zip(ours, genie):
        if not math.isnan(a.rate):
            assert a.rate <= b.rate + 1e-9


def test_curve_endpoints(curves):
    ours, genie = curves["our"], curves["khkc"]
    assert math.isnan(ours[0].rate)  # zero distortion unreachable
    assert genie[0].rate > 0.45
    assert ours[-1].rate == pytest.approx(genie[-1].rate, abs=1e-12)


def test_curves_monotone(curves):
    rates = [p.rate for p in curves["our"] if not math.isnan(p.rate)]
    assert all(x <= y + 1e-12 for x, y in zip(rates, rates[1:]))
    first_feasible = [not math.isnan(p.rate) for p in curves["our"]]
    assert first_feasible == sorted(first_feasible)


def test_inner_frontier_points_are_genie_feasible():
    # achievable points never escape the genie outer bound
    from isacmac.inner import Example4Grid, sweep_example4

    ch = build_example(4)
    grid = Example4Grid(
        p_u=(0.0,), p_s1=(0.0, 0.4, 0.5), p_s2=(0.0,),
        p_t1=(0.0, 0.5), p_t2=(0.0, 0.5), p_e=(0.0, 0.15, 0.3), zoom=1,
    )
    res = sweep_example4(grid=grid, processes=1, channel=ch)
    schemes = outer_scheme_grid(ch, kappas=(0.5,), levels=(0.0, 0.5, 1.0))
    polys = []
    for s in schemes:
        poly, d1m, d2m = eval_outer_khkc(ch, s)
        if poly.feasible:
            polys.append((poly, d1m, d2m))
    for kind in ("our", "our-com", "awk"):
        for p in res[kind].frontier():
            covered = any(
                poly.contains(p.r1 - 1e-6, p.r2 - 1e-6)
                and p.d1 >= d1m - 1e-6 and p.d2 >= d2m - 1e-6
                for poly, d1m, d2m in polys
            )
            assert covered, (kind, p)
