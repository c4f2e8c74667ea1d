"""Acceptance-check suite: one callable per criterion, plus a runner.

Each criterion function takes an AcceptanceContext (carrying channels,
grids, and the cached heavy sweep) and returns a CheckResult with
per-assertion detail lines. `run_verify` prints one pass/fail line per
criterion and is the engine behind ``isacmac verify``; the pytest suite
parametrizes over the same registry.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import prob
from .channels import assemble_joint, build_example, hamming, uniform_inputs
from .errors import ArgumentError
from .estimator import (
    EstimatorMap,
    estimator_kernel,
    expected_distortion,
    optimal_estimator,
)
from .inner import (
    Example4Grid,
    eval_inner_awk,
    eval_inner_our,
    example1_scheme,
    example2_scheme,
    random_common_scheme,
    scheme_joint,
    sweep_example12,
    sweep_example4,
    to_common_compression,
)
from .mc import SimConfig, simulate
from .outer import (
    composite_omega,
    eval_outer_khkc,
    khkc_feasible,
    min_distortion_our,
    our_feasible,
    outer_scheme_grid,
    sweep_example4_outer,
)
from .rd import RdProblem, brute_force_rd, rd_curve, rd_function

K_GATED = 0.321928094887362
K_RESIDUAL = 0.204959720615478
K_R1_GAP = 0.116968374271884


@dataclass
class CheckResult:
    cid: str
    title: str
    passed: bool
    details: list
    seconds: float


class Checker:
    def __init__(self):
        self.lines = []
        self.ok = True

    def check(self, cond, label):
        cond = bool(cond)
        self.lines.append(("PASS" if cond else "FAIL") + "  " + label)
        self.ok = self.ok and cond
        return cond


@dataclass
class AcceptanceContext:
    processes: object = None
    channel4: object = None
    ex4_grid: object = None
    _cache: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.channel4 is None:
            self.channel4 = build_example(4)
        if self.ex4_grid is None:
            self.ex4_grid = Example4Grid()

    def ex4_sweep(self):
        if "ex4" not in self._cache:
            self._cache["ex4"] = sweep_example4(
                grid=self.ex4_grid, processes=self.processes,
                channel=self.channel4,
            )
        return self._cache["ex4"]


# ---------------------------------------------------------------------------
# criterion 1: exact constants
# ---------------------------------------------------------------------------

def check_constants(ctx):
    c = Checker()
    d = prob.product(prob.bernoulli("X", 0.4), prob.bernoulli("B", 0.5))
    d = prob.chain(
        d, prob.deterministic_kernel(("X", "B"), (2, 2), "Z", 2, lambda x, b: x * b)
    )
    gated = prob.mutual_info(d, {"X"}, {"Z"})
    c.check(abs(gated - K_GATED) <= 1e-9, f"gated-channel constant {gated!r}")
    resid = 1.0 - prob.binary_entropy(0.24)
    c.check(abs(resid - K_RESIDUAL) <= 1e-9, f"residual constant {resid!r}")
    h11 = prob.binary_entropy(0.11)
    c.check(abs(h11 - 0.5) <= 1e-3, f"h(0.11) = {h11!r} within 1e-3 of 0.5")
    return c


# ---------------------------------------------------------------------------
# criterion 2: rate-distortion function
# ---------------------------------------------------------------------------

def check_rd(ctx):
    c = Checker()
    problem = RdProblem(prob.bernoulli("T", 0.3), ("T",), "T", hamming(2))
    f138 = rd_function(problem, 0.138)
    c.check(abs(f138 - 0.3023) <= 5e-4, f"f(0.138) = {f138!r}")
    grid = [round(0.01 * k, 12) for k in range(31)]
    pts = rd_curve(problem, grid)
    h = prob.binary_entropy
    err = max(abs(p.R - max(h(0.3) - h(p.D), 0.0)) for p in pts)
    c.check(err <= 1e-4, f"31-point curve max analytic error {err:.2e}")
    worst = 0.0
    for D in (0.1, 0.138, 0.2):
        bf = brute_force_rd(problem, D, 200)
        ba = rd_function(problem, D)
        worst = max(worst, abs(bf - ba))
        c.check(ba <= bf + 1e-7, f"solver below grid bound at D={D}")
    c.check(worst <= 5e-3, f"brute-force agreement {worst:.2e}")
    return c


# ---------------------------------------------------------------------------
# criterion 3: first example
# ---------------------------------------------------------------------------

def check_ex1(ctx):
    c = Checker()
    ch = build_example(1)
    poly, d1, d2 = eval_inner_our(ch, example1_scheme("our", 0.5, 0.5, 0.5, 0.5, 0.5, channel=ch))
    c.check(
        poly.feasible and poly.contains(0.0, 1.0) and max(d1, d2) <= 1e-12,
        "private-description scheme certifies (0,1,0,0)",
    )
    sweep = sweep_example12(1, "awk", processes=ctx.processes, channel=ch)
    n_feas = sum(1 for r in sweep.records if r.feasible)
    c.check(
        sweep.max_feasible_rate(2) <= 0.5 + 1e-6,
        f"no feasible point above R2=0.5 ({n_feas} feasible of {len(sweep.records)})",
    )
    all_blocked = all(
        min(dict(r.slack)["common1"], dict(r.slack)["common2"]) < -1e-6
        for r in sweep.records
    )
    c.check(
        all_blocked,
        "every family member violates common decodability (the description cannot ride along)",
    )
    return c


# ---------------------------------------------------------------------------
# criterion 4: second example
# ---------------------------------------------------------------------------

def _estimate_info(ch, scheme):
    """I(target; estimator output) for transmitter 2 of one awk scheme."""
    joint = scheme_joint(ch, scheme)
    roles = scheme.roles()
    obs = tuple(n for n in ("X2", "U1", "Z2", roles["V1"]) if n)
    est = optimal_estimator(joint, obs, "ST2", ch.d2)
    marg = prob.marginalize(joint, set(obs) | {"ST2"})
    sizes = tuple(marg.size_of(n) for n in obs)
    j2 = prob.chain(marg, estimator_kernel(est, "SHAT", sizes))
    return prob.mutual_info(j2, {"ST2"}, {"SHAT"})


def check_ex2(ctx):
    c = Checker()
    ch = build_example(2)
    poly, d1, d2 = eval_inner_our(
        ch, example2_scheme("our", 0.0, 0.5, 0.0, 0.0, 0.5, channel=ch)
    )
    c.check(
        poly.feasible and poly.contains(0.0, 0.0) and max(d1, d2) <= 1e-12,
        "common-description scheme certifies (0,0,0,0)",
    )
    sweep = sweep_example12(2, "awk", processes=ctx.processes, channel=ch)
    feas = [r for r in sweep.records if r.feasible]
    c.check(feas, f"family has feasible members ({len(feas)})")
    c.check(
        all(dict(r.params)["pFlip"] > 0 for r in feas),
        "the exact description is infeasible throughout",
    )
    worst = 0.0
    for r in feas:
        p = dict(r.params)
        scheme = example2_scheme(
            "awk", p["pU"], p["pSigma1"], p["pSigma2"], p["pTheta1"],
            p["pTheta2"], flip=p["pFlip"], channel=ch,
        )
        worst = max(worst, _estimate_info(ch, scheme))
    c.check(worst <= 0.25 + 1e-6, f"estimate information capped ({worst:.6f} <= 0.25)")
    dmin = min(r.d2 for r in feas)
    c.check(dmin > 0, f"frontier distortion strictly positive ({dmin:.6f})")
    return c


# ---------------------------------------------------------------------------
# criterion 5: third example
# ---------------------------------------------------------------------------

def check_ex3(ctx):
    c = Checker()
    ch = build_example(3)
    schemes = outer_scheme_grid(ch, kappas=(0.5,), levels=(0.0, 0.5, 1.0))
    schemes = schemes[:: max(1, len(schemes) // 8)][:8]
    d1 = min(min_distortion_our(ch, s, 1) for s in schemes)
    d2 = min(min_distortion_our(ch, s, 2) for s in schemes)
    c.check(abs(d1 - 0.11) <= 1e-6, f"rate-limited floor D1min = {d1!r}")
    c.check(abs(d2 - 0.11) <= 1e-6, f"rate-limited floor D2min = {d2!r}")
    g1 = g2 = 1.0
    for s in schemes:
        _, a, b = eval_outer_khkc(ch, s)
        g1, g2 = min(g1, a), min(g2, b)
    c.check(max(g1, g2) <= 1e-12, f"genie floors ({g1!r}, {g2!r})")
    return c


# ---------------------------------------------------------------------------
# criterion 6: fourth example, achievable side
# ---------------------------------------------------------------------------

def _near(points, target, tol):
    tr1, tr2, td2 = target
    dr, dd = tol
    return any(
        abs(p.r1 - tr1) <= dr and abs(p.r2 - tr2) <= dr and abs(p.d2 - td2) <= dd
        for p in points
    )


def check_ex4_inner(ctx):
    c = Checker()
    res = ctx.ex4_sweep()
    ours, ourc, awk = res["our"].points, res["our-com"].points, res["awk"].points

    t_sense = (0.0, 0.0, 0.13072)
    t_trade = (K_R1_GAP, 0.0, 0.1783)
    t_comm = (0.918563, 0.0, 0.3)

    c.check(_near(ourc, t_sense, (1e-3, 2e-3)), "our-com reaches the sensing corner")
    c.check(_near(ourc, t_trade, (2e-3, 2e-3)), "our-com reaches the tradeoff point")
    c.check(_near(ours, t_sense, (1e-3, 2e-3)), "our reaches the sensing corner")
    c.check(_near(ours, t_trade, (2e-3, 2e-3)), "our reaches the tradeoff point")
    c.check(_near(ours, t_comm, (1e-3, 2e-3)), "our reaches the communication corner")
    c.check(
        not _near(ourc, t_comm, (2e-3, 2e-3)),
        "our-com misses the communication corner",
    )
    c.check(
        not _near(awk, t_comm, (2e-3, 2e-3))
        and not _near(awk, t_sense, (2e-3, 2e-3))
        and not _near(awk, t_trade, (2e-3, 2e-3)),
        "awk attains none of the three tuples",
    )
    feas = [r for r in res["awk"].records if r.feasible]
    dmin = min((r.d2 for r in feas), default=1.0)
    c.check(dmin > 0.138, f"awk distortion floor {dmin:.6f} > 0.138")
    capped = [
        min(r.r1, r.sum_b, r.sum_c) for r in feas if r.d2 <= 0.1783 + 1e-6
    ]
    c.check(
        max(capped, default=0.0) < K_R1_GAP,
        f"awk rate below {K_R1_GAP} at the tradeoff distortion "
        f"({len(capped)} candidate points)",
    )
    c.check(
        all(r.d1 <= 1e-12 for k in res for r in res[k].records),
        "transmitter 1 always senses exactly",
    )
    return c


# ---------------------------------------------------------------------------
# criterion 7: fourth example, converse side
# ---------------------------------------------------------------------------

def check_ex4_outer(ctx):
    c = Checker()
    curves = sweep_example4_outer(channel=ctx.channel4)
    ours, genie = curves["our"], curves["khkc"]
    c.check(
        all(
            a.rate <= b.rate + 1e-9
            for a, b in zip(ours, genie) if not math.isnan(a.rate)
        ),
        "rate-limited curve never exceeds the genie curve",
    )
    c.check(math.isnan(ours[0].rate), "zero distortion unreachable under rate limits")
    c.check(genie[0].rate > 0.0, "zero distortion reachable under the genie")
    c.check(
        abs(ours[-1].rate - genie[-1].rate) <= 1e-9,
        "curves coincide at the distortion bound",
    )
    feas = [p.rate for p in ours if not math.isnan(p.rate)]
    c.check(
        all(x <= y + 1e-12 for x, y in zip(feas, feas[1:])),
        "rate-limited curve nondecreasing",
    )
    scheme = outer_scheme_grid(ctx.channel4, kappas=(0.5,), levels=(0.5,))[0]
    c.check(
        khkc_feasible(ctx.channel4, scheme, 0.0, 0.0, 0.0, 0.0)
        and not our_feasible(ctx.channel4, scheme, 0.0, 0.0, 0.0, 0.0),
        "origin tuple separates the two bounds",
    )
    return c


# ---------------------------------------------------------------------------
# criterion 8: property suites
# ---------------------------------------------------------------------------

def check_properties(ctx):
    c = Checker()
    rng = np.random.default_rng(20240811)

    # probability core: chain rule, data processing, oracle equivalence
    worst_cr = worst_dp = worst_or = 0.0
    for _ in range(200):
        raw = rng.random((2, 3, 2))
        d = prob.JointDist(("A", "B", "C"), raw / raw.sum())
        lhs = prob.entropy(d, {"A", "B"}, {"C"})
        rhs = prob.entropy(d, {"A"}, {"C"}) + prob.entropy(d, {"B"}, {"A", "C"})
        worst_cr = max(worst_cr, abs(lhs - rhs))

        pa = rng.random(2)
        m = prob.JointDist(("A",), pa / pa.sum())
        kb = rng.random((2, 3))
        m = prob.chain(m, prob.CondKernel(("A",), ("B",), kb / kb.sum(1, keepdims=True)))
        kc = rng.random((3, 2))
        m = prob.chain(m, prob.CondKernel(("B",), ("C",), kc / kc.sum(1, keepdims=True)))
        worst_dp = max(
            worst_dp,
            prob.mutual_info(m, {"A"}, {"C"}) - prob.mutual_info(m, {"A"}, {"B"}),
        )

        # definition-level mutual information oracle
        pab = prob.marginalize(d, {"A", "B"}).probs
        pa_ = pab.sum(axis=1)
        pb_ = pab.sum(axis=0)
        oracle = sum(
            p * math.log2(p / (pa_[i] * pb_[j]))
            for (i, j), p in np.ndenumerate(pab) if p > 0
        )
        worst_or = max(worst_or, abs(prob.mutual_info(d, {"A"}, {"B"}) - oracle))
    c.check(worst_cr <= 1e-10, f"chain rule on 200 joints ({worst_cr:.1e})")
    c.check(worst_dp <= 1e-10, f"data processing on 200 chains ({worst_dp:.1e})")
    c.check(worst_or <= 1e-10, f"oracle equivalence on 200 joints ({worst_or:.1e})")

    # estimator optimality against 500 random maps
    raw = rng.random((2, 2, 3))
    j = prob.JointDist(("A", "B", "T"), raw / raw.sum())
    d3 = hamming(3)
    best = expected_distortion(
        j, optimal_estimator(j, ("A", "B"), "T", d3), "T", d3
    )
    ok = all(
        best
        <= expected_distortion(
            j, EstimatorMap(("A", "B"), rng.integers(0, 3, (2, 2)), 3), "T", d3
        )
        + 1e-12
        for _ in range(500)
    )
    c.check(ok, "optimal estimator beats 500 random maps")

    # inclusion mapping on 100 random common-only schemes
    ch4 = ctx.channel4
    n_feas, worst_gap, mapped_bad = 0, 0.0, 0
    for _ in range(100):
        awk = random_common_scheme(ch4, rng)
        pa, da1, da2 = eval_inner_awk(ch4, awk)
        po, do1, do2 = eval_inner_our(ch4, to_common_compression(awk))
        worst_gap = max(
            worst_gap, pa.r1 - po.r1, pa.r2 - po.r2,
            pa.sum12[0] - po.sum12[0], pa.sum12[1] - po.sum12[1],
        )
        if pa.feasible:
            n_feas += 1
            mapped_bad += 0 if po.feasible else 1
            worst_gap = max(worst_gap, abs(da1 - do1), abs(da2 - do2))
    c.check(worst_gap <= 1e-9, f"inclusion dominance within 1e-9 ({worst_gap:.1e})")
    c.check(
        n_feas >= 20 and mapped_bad == 0,
        f"feasibility transfers on {n_feas} feasible schemes",
    )

    # outer subset property across the scheme/distortion grid
    schemes = outer_scheme_grid(ch4, kappas=(0.5, 0.3), levels=(0.0, 0.5, 1.0))
    witness, violations, n_checked = 0, 0, 0
    for s in schemes[:: max(1, len(schemes) // 40)]:
        for d2v in (0.0, 0.15, 0.3):
            n_checked += 1
            ours = our_feasible(ch4, s, 0.0, 0.0, 0.0, d2v)
            genie = khkc_feasible(ch4, s, 0.0, 0.0, 0.0, d2v)
            if ours and not genie:
                violations += 1
            if genie and not ours:
                witness += 1
    c.check(violations == 0, f"subset property on {n_checked} grid points")
    c.check(witness >= 1, f"strict-gap witnesses found ({witness})")

    # composite-map identity
    t = np.linspace(0.0, 1.0, 1001)
    err = float(np.max(np.abs(
        prob.binary_entropy(composite_omega(2 * t * (1 - t))) - prob.binary_entropy(t)
    )))
    c.check(err <= 1e-12, f"composite identity on 1001 points ({err:.1e})")

    # seeded simulation agreement at n = 1e5
    for ex, obs, target in ((1, ("X1", "Z1"), "ST1"), (4, ("X2", "Z2"), "ST2")):
        ch = build_example(ex)
        joint = assemble_joint(ch, uniform_inputs(ch))
        d = ch.d1 if target == "ST1" else ch.d2
        est = optimal_estimator(joint, obs, target, d)
        want = expected_distortion(joint, est, target, d)
        mean, stderr = simulate(SimConfig(ch, obs, target, 100_000, seed=20240811))
        c.check(
            abs(mean - want) <= 4 * stderr + 1e-12,
            f"simulation within 4 stderr on example {ex} "
            f"(|{mean:.5f} - {want:.5f}| vs {4 * stderr:.5f})",
        )
    return c


CRITERIA = (
    ("constants", "exact information constants", check_constants),
    ("rd", "rate-distortion solver anchors", check_rd),
    ("ex1", "example 1: private echo description", check_ex1),
    ("ex2", "example 2: common echo description", check_ex2),
    ("ex3", "example 3: rate-limited sensing floor", check_ex3),
    ("ex4-inner", "example 4: achievable frontiers", check_ex4_inner),
    ("ex4-outer", "example 4: converse curves", check_ex4_outer),
    ("properties", "randomized property suites", check_properties),
)


def run_criterion(cid, ctx=None):
    ctx = ctx or AcceptanceContext()
    for c, title, fn in CRITERIA:
        if c == cid:
            t0 = time.time()
            checker = fn(ctx)
            return CheckResult(c, title, checker.ok, checker.lines, time.time() - t0)
    raise ArgumentError(f"unknown criterion {cid!r}")


def run_verify(only=None, processes=None, ctx=None, stream=None):
    import sys

    stream = stream or sys.stdout
    ctx = ctx or AcceptanceContext(processes=processes)
    selected = [
        (cid, title, fn)
        for cid, title, fn in CRITERIA
        if not only or any(cid.startswith(p) for p in only)
    ]
    if not selected:
        raise ArgumentError(f"no criteria match {only!r}")
    all_ok = True
    for cid, title, fn in selected:
        t0 = time.time()
        checker = fn(ctx)
        dt = time.time() - t0
        status = "PASS" if checker.ok else "FAIL"
        stream.write(f"{status}  {cid:<10} {title} ({dt:.1f}s)\n")
        for line in checker.lines:
            stream.write(f"      {line}\n")
        all_ok = all_ok and checker.ok
    stream.write(("all criteria passed" if all_ok else "FAILURES present") + "\n")
    return all_ok
