"""Converse (outer) bounds on the capacity-distortion region.

Two outer evaluations share one rate machinery over auxiliary variables
(Q, T) with T carrying Q as a deterministic coordinate and the inputs drawn
from P(X1, X2 | T):

* ``outer-khkc`` -- dependence-balance rate bounds plus genie-aided
  sensing: each transmitter's distortion is evaluated as if it saw both
  inputs and both echoes.
* ``outer-our``  -- the same rate bounds plus rate-limited sensing
  constraints: the minimum description rate f_k(D_k) of target k must fit
  through both the partner's echo channel and the full echo pair.

For the fourth example the module also evaluates the closed-form
parallel-output relaxation (appending Z_pc = X2 forces product inputs),
whose scalar bounds are expressed through the composite map
omega(t) = (1 - sqrt(|1-2t|)) / 2 with h(omega(2t(1-t))) = h(t).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import build_example, state_bit_marginal
from .errors import ArgumentError, SchemaError
from .estimator import expected_distortion, optimal_estimator
from .inner import FEAS_TOL, RatePolygon, TermEngine
from .prob import CondKernel, JointDist, binary_entropy, chain, marginalize, product
from .rd import RdProblem, min_distortion, rd_function


# ---------------------------------------------------------------------------
# schemes and generic evaluation
# ---------------------------------------------------------------------------

@dataclass
class OuterScheme:
    """Joint law P(Q, T, X1, X2) with Q a deterministic coordinate of T."""

    q_of_t: np.ndarray  # Q symbol per T symbol
    p_tx: np.ndarray    # (|T|, |X1|, |X2|)
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.q_of_t = np.asarray(self.q_of_t, dtype=int)
        self.p_tx = np.asarray(self.p_tx, dtype=float)
        if abs(self.p_tx.sum() - 1.0) > 1e-9:
            raise SchemaError("outer scheme joint must sum to 1")

    @property
    def n_q(self):
        return int(self.q_of_t.max()) + 1

    def joint(self):
        n_t, n1, n2 = self.p_tx.shape
        probs = np.zeros((self.n_q, n_t, n1, n2))
        for t in range(n_t):
            probs[self.q_of_t[t], t] = self.p_tx[t]
        return JointDist(("Q", "T", "X1", "X2"), probs)


def product_scheme(kappa, rows1, rows2, q_of_t=None, label="", params=None):
    """P(T) x P(X1|T) x P(X2|T), the family forced by the parallel output."""
    kappa = np.asarray(kappa, dtype=float)
    rows1 = np.asarray(rows1, dtype=float)
    rows2 = np.asarray(rows2, dtype=float)
    p_tx = kappa[:, None, None] * rows1[:, :, None] * rows2[:, None, :]
    if q_of_t is None:
        q_of_t = np.arange(len(kappa))
    return OuterScheme(q_of_t, p_tx, label=label, params=params or {})


def outer_joint(channel, scheme):
    cap = channel.size_of("X1") * channel.size_of("X2") + 3
    if scheme.p_tx.shape[0] > cap:
        raise SchemaError(f"|T| exceeds the cardinality cap {cap}")
    inputs = scheme.joint()
    if (
        inputs.size_of("X1") != channel.size_of("X1")
        or inputs.size_of("X2") != channel.size_of("X2")
    ):
        raise SchemaError("outer scheme input alphabets mismatch the channel")
    # inputs x state x channel; the state is independent of (Q, T, X1, X2)
    joint = product(inputs, channel.state)
    return chain(joint, channel.kernel)


def _rate_terms(eng):
    r1 = eng.I(("X1",), ("Y", "Z1", "Z2"), ("SR", "X2", "T"))
    r2 = eng.I(("X2",), ("Y", "Z1", "Z2"), ("SR", "X1", "T"))
    s1 = eng.I(("X1", "X2"), ("Y", "Z1", "Z2"), ("SR", "T"))
    s2 = eng.I(("X1", "X2"), ("Y",), ("SR",))
    dep = eng.I(("X1",), ("X2",), ("Z1", "Z2", "T")) - eng.I(
        ("X1",), ("X2",), ("T",)
    )
    return r1, r2, s1, s2, dep


def sensing_caps(eng, k):
    """(partner-echo cap, full-echo cap) for target k's description rate."""
    own_x, own_z = (f"X{k}", f"Z{k}")
    other_x = "X2" if k == 1 else "X1"
    target = f"ST{k}"
    c_echo = eng.I((target, other_x), (own_z,), (own_x, "Q"))
    c_pair = eng.I((target,), ("Z1", "Z2"), ("X1", "X2", "Q"))
    return c_echo, c_pair


def rd_problem_for(channel, joint, k):
    target = f"ST{k}"
    cond = (f"X{k}", f"Z{k}", target)
    marg = marginalize(joint, set(cond))
    d = channel.d1 if k == 1 else channel.d2
    return RdProblem(marg, cond, target, d)


def eval_outer_our(channel, scheme, D1, D2):
    """(RatePolygon, feasible) of the rate-limited outer bound at (D1, D2)."""
    joint = outer_joint(channel, scheme)
    eng = TermEngine(joint)
    r1, r2, s1, s2, dep = _rate_terms(eng)
    slack = {"dep_balance": dep}
    feasible = dep >= -FEAS_TOL
    for k, D in ((1, D1), (2, D2)):
        c_echo, c_pair = sensing_caps(eng, k)
        f = rd_function(rd_problem_for(channel, joint, k), D)
        slack[f"sensing{k}"] = min(c_echo, c_pair) - f
        feasible = feasible and slack[f"sensing{k}"] >= -FEAS_TOL
    poly = RatePolygon(r1, r2, (s1, s2), feasible, slack)
    return poly, feasible


def eval_outer_khkc(channel, scheme):
    """(RatePolygon, D1min, D2min) of the genie-aided outer bound."""
    joint = outer_joint(channel, scheme)
    eng = TermEngine(joint)
    r1, r2, s1, s2, dep = _rate_terms(eng)
    dmins = []
    for k in (1, 2):
        target = f"ST{k}"
        d = channel.d1 if k == 1 else channel.d2
        est = optimal_estimator(joint, ("X1", "X2", "Z1", "Z2"), target, d)
        dmins.append(expected_distortion(joint, est, target, d))
    poly = RatePolygon(
        r1, r2, (s1, s2), dep >= -FEAS_TOL, {"dep_balance": dep}
    )
    return poly, dmins[0], dmins[1]


def min_distortion_our(channel, scheme, k):
    """Smallest D_k passing the rate-limited sensing constraints."""
    joint = outer_joint(channel, scheme)
    eng = TermEngine(joint)
    c_echo, c_pair = sensing_caps(eng, k)
    problem = rd_problem_for(channel, joint, k)
    return min_distortion(problem, min(c_echo, c_pair), tol=FEAS_TOL)


def khkc_feasible(channel, scheme, R1, R2, D1, D2):
    poly, d1min, d2min = eval_outer_khkc(channel, scheme)
    return (
        poly.feasible
        and poly.contains(R1, R2)
        and D1 >= d1min - 1e-6
        and D2 >= d2min - 1e-6
    )


def our_feasible(channel, scheme, R1, R2, D1, D2):
    poly, ok = eval_outer_our(channel, scheme, D1, D2)
    return ok and poly.contains(R1, R2)


def outer_scheme_grid(channel, kappas=(0.5, 0.3), levels=(0.0, 0.25, 0.5, 0.75, 1.0)):
    """Binary-T product schemes (dependence balance holds by construction)."""
    schemes = []
    for kap, p10, p11, p20, p21 in itertools.product(
        kappas, levels, levels, levels, levels
    ):
        rows1 = np.array([[p10, 1 - p10], [p11, 1 - p11]])
        rows2 = np.array([[p20, 1 - p20], [p21, 1 - p21]])
        schemes.append(
            product_scheme(
                (kap, 1 - kap), rows1, rows2,
                label="grid",
                params={"kappa": kap, "pi1": (p10, p11), "pi2": (p20, p21)},
            )
        )
    return schemes


# ---------------------------------------------------------------------------
# closed-form bounds for the fourth example
# ---------------------------------------------------------------------------

def composite_omega(t):
    """omega(t) = (1 - sqrt(|1 - 2t|)) / 2 on [0, 1]."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < -1e-15) or np.any(arr > 1 + 1e-15):
        raise ArgumentError("composite_omega argument outside [0,1]")
    out = (1.0 - np.sqrt(np.abs(1.0 - 2.0 * np.clip(arr, 0.0, 1.0)))) / 2.0
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AlphaParams:
    """Scalar summaries of a product scheme used by the closed-form bounds.

    alpha1/alpha2 summarize per-input randomness (at most 1/4); alpha is
    P(X1 = 0). Any scheme realizes alpha >= alpha1, but the sweep covers
    the full documented ranges since the bound direction stays valid.
    """

    alpha1: float
    alpha2: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha1 <= 0.25 + 1e-12:
            raise ArgumentError("alpha1 outside [0, 1/4]")
        if not 0.0 <= self.alpha2 <= 0.25 + 1e-12:
            raise ArgumentError("alpha2 outside [0, 1/4]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ArgumentError("alpha outside [0, 1]")


def alphas_of_scheme(scheme):
    """(alpha1, alpha2, alpha) realized by a product scheme."""
    kappa = scheme.p_tx.sum(axis=(1, 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        pi1 = np.where(kappa > 0, scheme.p_tx.sum(axis=2)[:, 0] / kappa, 0.0)
        pi2 = np.where(kappa > 0, scheme.p_tx.sum(axis=1)[:, 0] / kappa, 0.0)
    a1 = float(np.sum(kappa * pi1 * (1 - pi1)))
    a2 = float(np.sum(kappa * pi2 * (1 - pi2)))
    a = float(np.sum(kappa * pi1))
    return AlphaParams(a1, a2, a)


@dataclass(frozen=True)
class Example4OuterConstants:
    p_s1: float
    p_s2: float
    p_n: float
    p_b: float

    @classmethod
    def from_channel(cls, channel):
        return cls(
            state_bit_marginal(channel, "S1"),
            state_bit_marginal(channel, "S2"),
            state_bit_marginal(channel, "N"),
            state_bit_marginal(channel, "B"),
        )


def example4_outer_closed_form(alpha, D2, f2=None, channel=None):
    """Closed-form outer bounds (R1max, R2max, Rsum_max, sensing_slack).

    f2 maps a distortion budget to the minimum description rate of the
    target noise bit (computed by the rate-distortion solver when not
    supplied). The symmetric rate min(R1max, R2max, Rsum/2) is admissible
    whenever sensing_slack >= 0.
    """
    channel = channel or build_example(4)
    if not 0.0 <= D2 <= state_bit_marginal(channel, "N"):
        raise ArgumentError("D2 outside the target's distortion range")
    c = Example4OuterConstants.from_channel(channel)
    if f2 is None:
        f2 = make_f2_rd_pc(channel)
    h = binary_entropy
    r1max = float(h(composite_omega(2 * alpha.alpha1)))
    r2max = float(h(composite_omega(2 * alpha.alpha2)))
    rsum = float(
        h(c.p_s1 + (1 - 2 * c.p_s1) * alpha.alpha) + 1 - h(c.p_s1) - h(c.p_s2)
    )
    coop = float(h(c.p_b * (1 - alpha.alpha)) - (1 - alpha.alpha) * h(c.p_b))
    pair = float(h(c.p_n))
    slack = min(coop, pair) - f2(D2)
    return r1max, r2max, rsum, slack


def reduced_f2_problem(channel):
    """Description-rate problem of the echo-noise target alone."""
    p_n = state_bit_marginal(channel, "N")
    return RdProblem(
        JointDist(("ST2",), np.array([1 - p_n, p_n])), ("ST2",), "ST2",
        channel.d2,
    )


def parallel_f2_problem(channel, p1=0.5, p2=0.5):
    """Full-conditioning description-rate problem with the appended output.

    Conditioning covers (X2, Z2, Z_pc, ST2) with Z_pc a copy of X2; the
    reduction to the target-only problem is asserted numerically in tests,
    never assumed.
    """
    from .channels import assemble_joint, uniform_inputs

    joint = assemble_joint(channel, uniform_inputs(channel, p1=p1, p2=p2))
    copy = np.zeros((channel.size_of("X2"), channel.size_of("X2")))
    np.fill_diagonal(copy, 1.0)
    joint = chain(joint, CondKernel(("X2",), ("ZPC",), copy, validate=False))
    marg = marginalize(joint, {"X2", "Z2", "ZPC", "ST2"})
    return RdProblem(marg, ("X2", "Z2", "ZPC", "ST2"), "ST2", channel.d2)


def make_f2_rd_pc(channel):
    """Cached D -> f_2 map over the reduced problem (solver-backed)."""
    problem = reduced_f2_problem(channel)
    cache = {}

    def f2(D):
        key = round(float(D), 12)
        if key not in cache:
            cache[key] = rd_function(problem, float(D))
        return cache[key]

    return f2


@dataclass(frozen=True)
class SymmetricCurvePoint:
    d2: float
    rate: float  # nan when no scheme is admissible at this distortion


def sweep_example4_outer(
    alpha1_grid=None, alpha2_grid=None, alpha_grid=None, d2_grid=None,
    channel=None,
):
    """Symmetric-rate upper envelopes versus D2 for both outer bounds.

    Returns {"our": [SymmetricCurvePoint...], "khkc": [...]}; the genie
    variant carries no sensing constraint (its distortion floor is zero on
    this channel), so its curve is the unconstrained envelope.
    """
    channel = channel or build_example(4)
    a1 = np.asarray(alpha1_grid if alpha1_grid is not None else np.linspace(0, 0.25, 6))
    a2 = np.asarray(alpha2_grid if alpha2_grid is not None else np.linspace(0, 0.25, 6))
    al = np.asarray(alpha_grid if alpha_grid is not None else np.linspace(0, 1, 201))
    d2s = np.asarray(d2_grid if d2_grid is not None else np.round(np.linspace(0, 0.3, 31), 12))

    c = Example4OuterConstants.from_channel(channel)
    h = binary_entropy
    r1max = float(np.max(h(composite_omega(2 * a1))))
    r2max = float(np.max(h(composite_omega(2 * a2))))
    rsum = h(c.p_s1 + (1 - 2 * c.p_s1) * al) + 1 - h(c.p_s1) - h(c.p_s2)
    coop = h(c.p_b * (1 - al)) - (1 - al) * h(c.p_b)
    pair = float(h(c.p_n))
    rate = np.minimum(np.minimum(r1max, r2max), rsum / 2.0)

    f2 = make_f2_rd_pc(channel)
    ours, khkc = [], []
    khkc_rate = float(np.max(rate))
    for d2 in d2s:
        need = f2(d2)
        ok = np.minimum(coop, pair) - need >= -FEAS_TOL
        ours.append(
            SymmetricCurvePoint(
                float(d2), float(np.max(rate[ok])) if np.any(ok) else float("nan")
            )
        )
        khkc.append(SymmetricCurvePoint(float(d2), khkc_rate))
    return {"our": ours, "khkc": khkc}
