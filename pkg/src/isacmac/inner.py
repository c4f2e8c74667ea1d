"""Achievable rate-distortion regions for the cooperative schemes.

Two families of auxiliary-variable schemes are evaluated on a channel:

* ``awk``  -- message cooperation plus a single echo-compression variable
  per transmitter that must be decodable by the other transmitter
  (common-only compression).
* ``our``  -- message cooperation plus echo compression split into a
  common part (decoded by the other transmitter) and a private part
  (decoded by the receiver only). ``our-com`` is the same evaluation with
  the private parts absent, and ``kobayashi`` drops compression entirely.

An evaluation returns the explicit rate polygon induced by one concrete
scheme: every right-hand side is a scheme constant, so the region per
scheme is {R1 <= r1, R2 <= r2, R1+R2 <= min(sums)} when the scheme's
compression-feasibility constraints hold. Frontier sweeps vary schemes,
not rates.

Variable roles: U is the time-sharing/cooperation variable, U1/U2 carry
the common message parts, X1/X2 the inputs; V1c/V1p/V2c/V2p (or V1/V2 for
``awk``) are the compression descriptions, drawn from (Xk, Zk) per the
scheme factorization. A role mapped to ``None`` stands for the constant
(absent) variable and simply drops out of every information term.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .channels import assemble_joint, build_example, state_bit_marginal
from .errors import ArgumentError, SchemaError
from .estimator import expected_distortion, optimal_estimator
from .prob import CondKernel, JointDist, chain, marginalize
from . import prob

FEAS_TOL = 1e-9

OUR_ROLES = ("V1c", "V1p", "V2c", "V2p")
AWK_ROLES = ("V1", "V2")


# ---------------------------------------------------------------------------
# scheme description
# ---------------------------------------------------------------------------

@dataclass
class AuxScheme:
    """A concrete choice of auxiliary distributions for one scheme family.

    Kernels follow the factorization P(U) P(U1|U) P(U2|U) P(X1|U,U1)
    P(X2|U,U2) x state x channel x P(compression | own input & echo).
    Compression kernels may condition on any subset of (U,U1,U2,Xk,Zk)
    and emit any subset of the family's V roles; omitted roles are absent.
    """

    kind: str  # "our" or "awk"
    p_u: np.ndarray
    p_u1: np.ndarray  # (|U|, |U1|)
    p_u2: np.ndarray
    p_x1: np.ndarray  # (|U|, |U1|, |X1|)
    p_x2: np.ndarray
    compress1: CondKernel | None = None
    compress2: CondKernel | None = None
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("our", "awk"):
            raise ArgumentError(f"unknown scheme kind {self.kind!r}")
        allowed = OUR_ROLES if self.kind == "our" else AWK_ROLES
        for kern, own in ((self.compress1, "1"), (self.compress2, "2")):
            if kern is None:
                continue
            for name in kern.out_names:
                if name not in allowed or name[1] != own:
                    raise SchemaError(
                        f"compression kernel {own} may not emit {name!r}"
                    )

    def roles(self):
        out = {r: None for r in OUR_ROLES + AWK_ROLES}
        for kern in (self.compress1, self.compress2):
            if kern is not None:
                for name in kern.out_names:
                    out[name] = name
        return out

    def input_joint(self):
        # kernels are constructed from probabilities, so skip re-validation
        d = JointDist(("U",), self.p_u)
        d = chain(d, CondKernel(("U",), ("U1",), self.p_u1, validate=False))
        d = chain(d, CondKernel(("U",), ("U2",), self.p_u2, validate=False))
        d = chain(d, CondKernel(("U", "U1"), ("X1",), self.p_x1, validate=False))
        d = chain(d, CondKernel(("U", "U2"), ("X2",), self.p_x2, validate=False))
        return d


def scheme_joint(channel, scheme):
    """Full joint of the scheme on the channel, compression included."""
    extra = [k for k in (scheme.compress1, scheme.compress2) if k is not None]
    return assemble_joint(channel, scheme.input_joint(), extra)


# ---------------------------------------------------------------------------
# polygon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatePolygon:
    """Explicit rate region of one scheme: R1 <= r1, R2 <= r2, sums capped."""

    r1: float
    r2: float
    sum12: tuple
    feasible: bool
    slack: dict

    def nonempty(self, tol=FEAS_TOL):
        return (
            self.r1 >= -tol
            and self.r2 >= -tol
            and all(s >= -tol for s in self.sum12)
        )

    def contains(self, R1, R2, tol=FEAS_TOL):
        if not (self.feasible and self.nonempty(tol)):
            return False
        return (
            R1 <= self.r1 + tol
            and R2 <= self.r2 + tol
            and all(R1 + R2 <= s + tol for s in self.sum12)
        )

    def vertices(self, tol=FEAS_TOL):
        """Corner points of the clipped polygon (empty if infeasible)."""
        if not (self.feasible and self.nonempty(tol)):
            return []
        s = min(self.sum12) if self.sum12 else float("inf")
        r1 = max(min(self.r1, s), 0.0)
        r2 = max(min(self.r2, s), 0.0)
        pts = {(0.0, 0.0), (r1, 0.0), (0.0, r2)}
        if r1 + r2 <= s:
            pts.add((r1, r2))
        else:
            pts.add((r1, max(s - r1, 0.0)))
            pts.add((max(s - r2, 0.0), r2))
        return sorted(pts)


@dataclass(frozen=True)
class RegionPoint:
    """One rate-distortion tuple with the scheme that produced it."""

    r1: float
    r2: float
    d1: float
    d2: float
    scheme_id: str
    params: tuple = ()

    def key(self):
        return (
            round(self.r1, 12), round(self.r2, 12),
            round(self.d1, 12), round(self.d2, 12),
        )


def pareto_frontier(points):
    """Maximal points: rates up, distortions down, nobody dominated."""
    if not points:
        raise ArgumentError("pareto_frontier needs at least one point")
    uniq = {}
    for p in points:
        uniq.setdefault(p.key(), p)
    pts = list(uniq.values())
    arr = np.array([[p.r1, p.r2, -p.d1, -p.d2] for p in pts])
    keep = []
    order = np.argsort(-arr.sum(axis=1))
    arr = arr[order]
    pts = [pts[i] for i in order]
    for i in range(len(pts)):
        ge = np.all(arr >= arr[i] - 1e-15, axis=1)
        gt = np.any(arr > arr[i] + 1e-15, axis=1)
        if not np.any(ge & gt):
            keep.append(pts[i])
    return sorted(keep, key=RegionPoint.key)


# ---------------------------------------------------------------------------
# information-term engine
# ---------------------------------------------------------------------------

class TermEngine:
    """Cached subset entropies over one assembled joint."""

    def __init__(self, joint):
        self.joint = joint
        self._cache = {}

    def H(self, names):
        key = frozenset(names)
        if key not in self._cache:
            if not key:
                self._cache[key] = 0.0
            else:
                drop = tuple(
                    i for i, n in enumerate(self.joint.names) if n not in key
                )
                marg = self.joint.probs.sum(axis=drop) if drop else self.joint.probs
                p = marg.reshape(-1)
                mask = p > 0
                self._cache[key] = float(-np.sum(p[mask] * np.log2(p[mask])))
        return self._cache[key]

    def I(self, a, b, given=()):
        a = tuple(n for n in a if n)
        b = tuple(n for n in b if n)
        g = tuple(n for n in given if n)
        if not a or not b:
            return 0.0
        value = (
            self.H(a + g) + self.H(b + g) - self.H(a + b + g) - self.H(g)
        )
        if value < prob.MI_SANITY_FLOOR:
            raise prob.NumericalError(f"term {a};{b}|{g} = {value}")
        return max(value, 0.0)


def _term_joint(full):
    """Marginal used for rate terms: state coordinates are never referenced."""
    keep = set(full.names) - {"S", "ST1", "ST2"}
    return marginalize(full, keep)


# ---------------------------------------------------------------------------
# region formulas
# ---------------------------------------------------------------------------

def _split_terms(eng, roles):
    """Rate bounds and feasibility slacks for the split-compression scheme."""
    V1c, V1p, V2c, V2p = (roles[r] for r in OUR_ROLES)
    base = ("U", "U1", "U2")

    a1 = eng.I(("U1",), ("Z2",), ("U", "U2", "X2"))
    a2 = eng.I(("U2",), ("Z1",), ("U", "U1", "X1"))
    b1 = eng.I((V1c,), ("X1", "Z1"), base + ("X2", "Z2"))
    b2 = eng.I((V2c,), ("X2", "Z2"), base + ("X1", "Z1"))

    everything = base + ("X1", "X2", "Y", "SR")
    m1_1 = eng.I(("X1",), ("X2", "Y", "SR", V1c, V2c, V2p), base) - eng.I(
        (V1p,), ("Z1",), everything + tuple(v for v in (V1c, V2c, V2p) if v)
    )
    m1_2 = eng.I(("X2",), ("X1", "Y", "SR", V1c, V2c, V1p), base) - eng.I(
        (V2p,), ("Z2",), everything + tuple(v for v in (V1c, V2c, V1p) if v)
    )
    t_p1 = eng.I((V1p,), ("Z1",), everything + tuple(v for v in (V1c, V2c) if v))
    t_p2 = eng.I(
        (V2p,), ("Z2",), everything + tuple(v for v in (V1c, V2c, V1p) if v)
    )
    m2 = eng.I(("X1", "X2"), ("Y", "SR", V1c, V2c), base) - t_p1 - t_p2

    t_c1 = eng.I((V1c,), ("Z1",), everything)
    t_c2 = eng.I((V2c,), ("Z2",), everything + ((V1c,) if V1c else ()))
    sum_all = eng.I(("X1", "X2"), ("Y", "SR")) - t_c1 - t_c2 - t_p1 - t_p2

    r1 = a1 - b1 + min(m1_1, m2)
    r2 = a2 - b2 + min(m1_2, m2)
    sum_b = a1 - b1 + a2 - b2 + m2

    slack = {
        "common1": a1 - b1,
        "common2": a2 - b2,
        "private1": m1_1,
        "private2": m1_2,
        "sum_joint": m2,
        "sum_all": sum_all,
    }
    return r1, r2, (sum_b, sum_all), slack


def _common_terms(eng, roles):
    """Rate bounds and feasibility slacks for the common-only scheme."""
    V1, V2 = roles["V1"], roles["V2"]
    base = ("U", "U1", "U2")

    A1 = eng.I(("U1",), ("X2", "Z2"), ("U", "U2"))
    A2 = eng.I(("U2",), ("X1", "Z1"), ("U", "U1"))
    B1 = eng.I((V1,), ("X2", "Z2"), base)
    B2 = eng.I((V2,), ("X1", "Z1"), base)
    C1 = eng.I((V1,), ("X1", "Z1"), base)
    C2 = eng.I((V2,), ("X2", "Z2"), base)
    P1 = eng.I(("X1",), ("Y", "SR"), ("U", "X2"))
    P2 = eng.I(("X2",), ("Y", "SR"), ("U", "X1"))
    QU1 = eng.I(("X1", "X2"), ("Y", "SR"), ("U", "U1"))
    QU2 = eng.I(("X1", "X2"), ("Y", "SR"), ("U", "U2"))
    G = eng.I(("X1", "X2"), ("Y", "SR"), ("U",))
    W1 = eng.I((V1,), ("X1", "X2", "Y", "SR"), base)
    W2 = eng.I((V2,), ("X1", "X2", "Y", "SR"), base)
    W21 = eng.I((V2,), ("X1", "X2", "Y", "SR", V1), base)
    W12 = eng.I((V1,), ("X1", "X2", "Y", "SR", V2), base)
    X4_1 = eng.I(("X1",), ("Y", "SR", V1, V2), base + ("X2",))
    X4_2 = eng.I(("X2",), ("Y", "SR", V1, V2), base + ("X1",))

    pair1 = W1 + W21
    pair2 = W2 + W12
    r1 = A1 + B1 - C1 + min(
        P1 + pair1 - C1, QU1 + pair1 - C2, G + pair1 - C1 - C2, X4_1
    )
    r2 = A2 + B2 - C2 + min(
        P2 + pair2 - C2, QU2 + pair2 - C1, G + pair2 - C1 - C2, X4_2
    )
    pair_s = W1 + W21
    sum_b = (
        A2 + B2 - C2 + A1 + B1 - C1
        + min(
            QU2 + pair_s - C1,
            QU1 + pair_s - C2,
            G + pair_s - C1 - C2,
            eng.I(("X1", "X2"), ("Y", "SR", V1, V2), base),
        )
    )
    sum_c = eng.I(("X1", "X2"), ("Y", "SR")) + pair_s - C1 - C2

    slack = {
        "common1": A1 + B1 - C1,
        "common2": A2 + B2 - C2,
        "private1": P1 + pair_s - C1,
        "private2": P2 + pair_s - C2,
        "sum_all": G + pair_s - C1 - C2,
    }
    return r1, r2, (sum_b, sum_c), slack


def _polygon_from_terms(r1, r2, sums, slack):
    feasible = all(v >= -FEAS_TOL for v in slack.values())
    slack = dict(slack)
    slack.update({"r1": r1, "r2": r2, "sum_b": sums[0], "sum_c": sums[1]})
    poly = RatePolygon(r1, r2, tuple(sums), feasible, slack)
    return poly


def _distortion(channel, full, roles, k, kind):
    """Expected distortion of transmitter k's optimal estimator."""
    if kind == "our":
        extra = roles["V2c"] if k == 1 else roles["V1c"]
    else:
        extra = roles["V2"] if k == 1 else roles["V1"]
    own = ("X1", "Z1", "U2") if k == 1 else ("X2", "Z2", "U1")
    obs = tuple(n for n in own + (extra,) if n)
    target = "ST1" if k == 1 else "ST2"
    d = channel.d1 if k == 1 else channel.d2
    est = optimal_estimator(full, obs, target, d)
    return expected_distortion(full, est, target, d)


def eval_inner_our(channel, scheme):
    """(RatePolygon, D1, D2) of a split-compression scheme on `channel`."""
    if scheme.kind != "our":
        raise SchemaError("eval_inner_our expects an 'our'-kind scheme")
    full = scheme_joint(channel, scheme)
    eng = TermEngine(_term_joint(full))
    roles = scheme.roles()
    poly = _polygon_from_terms(*_split_terms(eng, roles))
    d1 = _distortion(channel, full, roles, 1, "our")
    d2 = _distortion(channel, full, roles, 2, "our")
    return poly, d1, d2


def eval_inner_awk(channel, scheme):
    """(RatePolygon, D1, D2) of a common-only-compression scheme."""
    if scheme.kind != "awk":
        raise SchemaError("eval_inner_awk expects an 'awk'-kind scheme")
    full = scheme_joint(channel, scheme)
    eng = TermEngine(_term_joint(full))
    roles = scheme.roles()
    poly = _polygon_from_terms(*_common_terms(eng, roles))
    d1 = _distortion(channel, full, roles, 1, "awk")
    d2 = _distortion(channel, full, roles, 2, "awk")
    return poly, d1, d2


def to_common_compression(scheme):
    """Map an awk scheme onto the split family: Vkc := Vk, no private parts."""
    if scheme.kind != "awk":
        raise ArgumentError("expected an awk scheme")

    def remap(kern):
        if kern is None:
            return None
        renames = {"V1": "V1c", "V2": "V2c"}
        return CondKernel(
            kern.given_names,
            tuple(renames[n] for n in kern.out_names),
            kern.probs,
            validate=False,
        )

    return AuxScheme(
        kind="our",
        p_u=scheme.p_u, p_u1=scheme.p_u1, p_u2=scheme.p_u2,
        p_x1=scheme.p_x1, p_x2=scheme.p_x2,
        compress1=remap(scheme.compress1),
        compress2=remap(scheme.compress2),
        label=scheme.label + "+common-map",
        params=dict(scheme.params),
    )


# ---------------------------------------------------------------------------
# parameterized scheme families for the bundled examples
# ---------------------------------------------------------------------------

def _xor_pair_kernels(p_sigma, p_theta):
    """U_k = U xor Sigma_k, X_k = U_k xor Theta_k with independent bits."""
    p_uk = np.array([[1 - p_sigma, p_sigma], [p_sigma, 1 - p_sigma]])
    p_xk = np.zeros((2, 2, 2))
    for u, uk in itertools.product(range(2), range(2)):
        p_xk[u, uk, uk] = 1 - p_theta
        p_xk[u, uk, 1 - uk] = p_theta
    return p_uk, p_xk


def binary_xor_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2,
                      compress1=None, compress2=None, label="", params=None):
    """The examples' common parameterization over five independent bits."""
    p_u1, p_x1 = _xor_pair_kernels(p_s1, p_t1)
    p_u2, p_x2 = _xor_pair_kernels(p_s2, p_t2)
    params = dict(params or {})
    params.update(pU=p_u, pSigma1=p_s1, pSigma2=p_s2, pTheta1=p_t1, pTheta2=p_t2)
    return AuxScheme(
        kind=kind,
        p_u=np.array([1 - p_u, p_u]),
        p_u1=p_u1, p_u2=p_u2, p_x1=p_x1, p_x2=p_x2,
        compress1=compress1, compress2=compress2,
        label=label, params=params,
    )


def echo_function_kernel(channel, tx, out_name, fn, flip=0.0):
    """Compression of a function of (Xk, Zk), optionally through a binary
    symmetric corruption with flip probability `flip`."""
    xk, zk = ("X1", "Z1") if tx == 1 else ("X2", "Z2")
    nx, nz = channel.size_of(xk), channel.size_of(zk)
    probs = np.zeros((nx, nz, 2))
    for x, z in itertools.product(range(nx), range(nz)):
        v = int(fn(x, z))
        probs[x, z, v] = 1 - flip
        probs[x, z, 1 - v] = flip
    return CondKernel((xk, zk), (out_name,), probs, validate=False)


def quantized_noise_kernel(channel, out_name, p_e):
    """Compression of the echo noise N of the fourth example.

    The description V and the noise satisfy N = V xor E with the flip E
    independent of V and P(E=1) = p_e, i.e. the backward test channel of a
    binary source under Hamming distortion; the kernel rows are its Bayes
    inversion on N = X1 xor Z1.
    """
    p_n = state_bit_marginal(channel, "N")
    if not 0.0 <= p_e <= p_n:
        raise ArgumentError(f"quantization flip {p_e} outside [0, {p_n}]")
    q1 = (p_n - p_e) / (1.0 - 2.0 * p_e)  # P(V=1)
    pv_given_n = np.zeros((2, 2))
    for v in range(2):
        pv = q1 if v else 1.0 - q1
        for n in range(2):
            flip = p_e if n != v else 1.0 - p_e
            pv_given_n[n, v] = pv * flip
    pn = np.array([1.0 - p_n, p_n])
    pv_given_n /= pn[:, None]

    probs = np.zeros((2, 2, 2))
    for x, z in itertools.product(range(2), range(2)):
        probs[x, z, :] = pv_given_n[x ^ z, :]
    return CondKernel(("X1", "Z1"), (out_name,), probs, validate=False)


def example1_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2, channel=None):
    """First example family: transmitter 1 describes S2 = X1 xor Z1.

    In the split family the description rides in the private part; the
    common-only family must carry the same description as common
    information, which its own decodability constraint forbids.
    """
    ch = channel if channel is not None else build_example(1)
    out = "V1p" if kind == "our" else "V1"
    k1 = echo_function_kernel(ch, 1, out, lambda x, z: x ^ z)
    return binary_xor_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2, compress1=k1,
                             label=f"example1-{kind}")


def example2_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2, flip=0.0, channel=None):
    """Second example family: transmitter 1 describes S1 = X1 xor Z1[msb].

    `flip` adds quantization noise to the description (the exact
    description is infeasible for the common-only family, so its sweep
    carries this extra axis)."""
    ch = channel if channel is not None else build_example(2)
    out = "V1c" if kind == "our" else "V1"
    k1 = echo_function_kernel(ch, 1, out, lambda x, z: x ^ (z >> 1), flip=flip)
    return binary_xor_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2, compress1=k1,
                             label=f"example2-{kind}", params={"pFlip": flip})


def example4_scheme(kind, p_u, p_s1, p_s2, p_t1, p_t2, p_e, channel=None):
    """Fourth example family: quantized noise description plus, for the
    full split scheme, a private description of S1 = X2 xor Z2[lsb] from
    transmitter 2."""
    ch = channel if channel is not None else build_example(4)
    k1 = quantized_noise_kernel(ch, "V1c" if kind != "awk" else "V1", p_e)
    k2 = None
    if kind == "our":
        k2 = echo_function_kernel(ch, 2, "V2p", lambda x, z: x ^ (z & 1))
    scheme_kind = "awk" if kind == "awk" else "our"
    scheme = binary_xor_scheme(
        scheme_kind, p_u, p_s1, p_s2, p_t1, p_t2,
        compress1=k1, compress2=k2,
        label=f"example4-{kind}", params={"pE": p_e},
    )
    return scheme


@dataclass(frozen=True)
class Example4Params:
    """One grid point of the fourth example's scheme family."""

    p_u: float
    p_s1: float
    p_s2: float
    p_t1: float
    p_t2: float
    p_e: float

    def __post_init__(self):
        for name in ("p_u", "p_s1", "p_s2", "p_t1", "p_t2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ArgumentError(f"{name}={v} outside [0,1]")
        if not 0.0 <= self.p_e <= 0.3:
            raise ArgumentError(f"p_e={self.p_e} outside [0, 0.3]")


# ---------------------------------------------------------------------------
# grid sweeps
# ---------------------------------------------------------------------------

def _steps(lo, hi, n):
    return tuple(round(float(v), 12) for v in np.linspace(lo, hi, n))


@dataclass(frozen=True)
class Example4Grid:
    """Default sweep resolutions for the fourth example's families.

    The input-bit axes exploit two exact symmetries (relabeling U, and
    relabeling X2 together with the outputs it feeds) to stay inside
    [0, 1/2] where possible; pTheta1 > 1/2 is covered by jointly flipping
    (pSigma1, pTheta1). One refinement pass re-sweeps the quantization
    axis tenfold finer around frontier candidates.
    """

    p_u: tuple = (0.0, 0.25, 0.5)
    p_s1: tuple = _steps(0.0, 1.0, 11)
    p_s2: tuple = (0.0, 0.25, 0.5)
    p_t1: tuple = _steps(0.0, 0.5, 6)
    p_t2: tuple = (0.0, 0.25, 0.5)
    p_e: tuple = _steps(0.0, 0.3, 31)
    zoom: int = 10


EX4_KINDS = ("our", "our-com", "awk")

_WORKER_CH = None


def _sweep_init(channel):
    global _WORKER_CH
    _WORKER_CH = channel


@dataclass(frozen=True)
class SweepRecord:
    kind: str
    params: tuple  # sorted (name, value) pairs
    r1: float
    r2: float
    sum_b: float
    sum_c: float
    feasible: bool
    slack: tuple  # sorted (name, value) pairs
    d1: float
    d2: float

    def polygon(self):
        return RatePolygon(
            self.r1, self.r2, (self.sum_b, self.sum_c), self.feasible,
            dict(self.slack),
        )

    def points(self):
        return [
            RegionPoint(v1, v2, self.d1, self.d2, self.kind, self.params)
            for v1, v2 in self.polygon().vertices()
        ]


def _record(kind, params, terms, d1, d2):
    r1, r2, sums, slack = terms
    feasible = all(v >= -FEAS_TOL for v in slack.values())
    return SweepRecord(
        kind, tuple(sorted(params.items())), r1, r2, sums[0], sums[1],
        feasible, tuple(sorted(slack.items())), d1, d2,
    )


def _roles_for(kind):
    roles = {r: None for r in OUR_ROLES + AWK_ROLES}
    if kind == "our":
        roles.update(V1c="V1c", V2p="V2p")
    elif kind == "our-com":
        roles.update(V1c="V1c")
    elif kind == "awk":
        roles.update(V1="V1c")
    else:
        raise ArgumentError(f"unknown sweep kind {kind!r}")
    return roles


def _ex4_eval_base(channel, base, pe_values, kinds):
    """All requested region kinds at one probability grid point.

    One physical joint is assembled per (base, p_e) pair and shared: the
    common-only family's single description coincides with the split
    family's common part, and the private part is simply never referenced
    by the reduced formulas.
    """
    p_u, p_s1, p_s2, p_t1, p_t2 = base
    plain = binary_xor_scheme("our", p_u, p_s1, p_s2, p_t1, p_t2)
    full0 = scheme_joint(channel, plain)
    keep = set(full0.names) - {"S", "ST1", "ST2"}
    term0 = marginalize(full0, keep)
    v2p = echo_function_kernel(channel, 2, "V2p", lambda x, z: x ^ (z & 1))
    term_a = chain(term0, v2p)

    est1 = marginalize(full0, {"X1", "U2", "Z1", "ST1"})
    e1 = optimal_estimator(est1, ("X1", "U2", "Z1"), "ST1", channel.d1)
    d1 = expected_distortion(est1, e1, "ST1", channel.d1)
    est2_base = marginalize(full0, {"U1", "X1", "X2", "Z1", "Z2", "ST2"})

    records = []
    for p_e in pe_values:
        k1 = quantized_noise_kernel(channel, "V1c", p_e)
        eng = TermEngine(chain(term_a, k1))
        est2 = marginalize(chain(est2_base, k1), {"U1", "X2", "Z2", "V1c", "ST2"})
        e2 = optimal_estimator(est2, ("U1", "X2", "Z2", "V1c"), "ST2", channel.d2)
        d2 = expected_distortion(est2, e2, "ST2", channel.d2)
        params = {
            "pU": p_u, "pSigma1": p_s1, "pSigma2": p_s2,
            "pTheta1": p_t1, "pTheta2": p_t2, "pE": p_e,
        }
        for kind in kinds:
            roles = _roles_for(kind)
            if kind == "awk":
                terms = _common_terms(eng, roles)
            else:
                terms = _split_terms(eng, roles)
            records.append(_record(kind, params, terms, d1, d2))
    return records


def _ex4_worker(task):
    base, pe_values, kinds = task
    return _ex4_eval_base(_WORKER_CH, base, pe_values, kinds)


def _run_tasks(channel, tasks, worker, processes):
    if processes is None:
        processes = min(os.cpu_count() or 1, 4)
    if processes <= 1 or len(tasks) < 8:
        _sweep_init(channel)
        chunks = [worker(t) for t in tasks]
    else:
        with Pool(processes, initializer=_sweep_init, initargs=(channel,)) as pool:
            chunks = pool.map(worker, tasks, chunksize=max(1, len(tasks) // (8 * processes)))
    return [rec for chunk in chunks for rec in chunk]


def rate_slice_frontier(points, axis):
    """2-D frontier of the zero-other-rate slice: rate up, distortions down.

    The distortion-optimal corners of a region sit on this slice; full 4-D
    dominance would discard them in favor of higher-rate vertices of the
    same polygons.
    """
    uniq = {}
    for p in points:
        if (p.r2 if axis == 1 else p.r1) <= 1e-12:
            uniq.setdefault(p.key(), p)
    pts = list(uniq.values())
    if not pts:
        return []
    arr = np.array(
        [[p.r1 if axis == 1 else p.r2, -p.d1, -p.d2] for p in pts]
    )
    keep = []
    for i in range(len(pts)):
        ge = np.all(arr >= arr[i] - 1e-15, axis=1)
        gt = np.any(arr > arr[i] + 1e-15, axis=1)
        if not np.any(ge & gt):
            keep.append(pts[i])
    return sorted(keep, key=RegionPoint.key)


def _frontier_pe_windows(records, grid):
    """Quantization values to refine: a window around each frontier point.

    Candidates come from the 4-D frontier and from both single-rate slice
    frontiers, so distortion-extreme corners get refined as well.
    """
    pts = []
    for rec in records:
        if rec.feasible:
            pts.extend(rec.points())
    if not pts:
        return {}
    step = (grid.p_e[-1] - grid.p_e[0]) / max(len(grid.p_e) - 1, 1)
    fine = step / grid.zoom
    windows = {}
    candidates = (
        pareto_frontier(pts)
        + rate_slice_frontier(pts, 1)
        + rate_slice_frontier(pts, 2)
    )
    for p in candidates:
        params = dict(p.params)
        base = (
            params["pU"], params["pSigma1"], params["pSigma2"],
            params["pTheta1"], params["pTheta2"],
        )
        pe = params["pE"]
        vals = windows.setdefault(base, set())
        k = 1
        while fine * k < step - 1e-12:
            for cand in (pe - fine * k, pe + fine * k):
                if 0.0 <= cand <= grid.p_e[-1] + 1e-12:
                    vals.add(round(min(cand, grid.p_e[-1]), 12))
            k += 1
    return windows


def sweep_example4(kinds=EX4_KINDS, grid=None, processes=None, channel=None):
    """Sweep the fourth example's families; returns kind -> SweepResult."""
    if isinstance(kinds, str):
        kinds = (kinds,)
    for k in kinds:
        if k not in EX4_KINDS:
            raise ArgumentError(f"unknown kind {k!r} for the example-4 sweep")
    grid = grid or Example4Grid()
    channel = channel or build_example(4)
    bases = list(itertools.product(grid.p_u, grid.p_s1, grid.p_s2, grid.p_t1, grid.p_t2))
    tasks = [(b, grid.p_e, tuple(kinds)) for b in bases]
    records = _run_tasks(channel, tasks, _ex4_worker, processes)

    if grid.zoom > 1:
        by_kind = {k: [r for r in records if r.kind == k] for k in kinds}
        refine = {}
        for k in kinds:
            for base, vals in _frontier_pe_windows(by_kind[k], grid).items():
                refine.setdefault(base, set()).update(vals)
        _sweep_init(channel)
        for base, vals in sorted(refine.items()):
            existing = set(grid.p_e)
            new = tuple(sorted(v for v in vals if v not in existing))
            if new:
                records.extend(_ex4_eval_base(channel, base, new, tuple(kinds)))

    out = {}
    for k in kinds:
        recs = sorted(
            (r for r in records if r.kind == k), key=lambda r: r.params
        )
        pts = [p for r in recs if r.feasible for p in r.points()]
        out[k] = SweepResult(k, pts, recs)
    return out


@dataclass
class SweepResult:
    kind: str
    points: list
    records: list

    def frontier(self):
        return pareto_frontier(self.points) if self.points else []

    def max_feasible_rate(self, axis):
        best = 0.0
        for rec in self.records:
            if rec.feasible and rec.polygon().nonempty():
                poly = rec.polygon()
                cap = min(poly.sum12) if poly.sum12 else float("inf")
                best = max(best, min(poly.r1 if axis == 1 else poly.r2, cap))
        return best


@dataclass(frozen=True)
class Example12Grid:
    """Default sweep resolutions for the first two examples' families."""

    p_u: tuple = (0.0, 0.25, 0.5)
    p_s1: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    p_s2: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    p_t1: tuple = _steps(0.0, 0.5, 5)
    p_t2: tuple = _steps(0.0, 0.5, 5)
    flips: tuple = _steps(0.0, 0.5, 5)  # description noise axis (example 2 only)


def _ex12_worker(task):
    example, kind, base, flips = task
    ch = _WORKER_CH
    records = []
    for flip in flips:
        params = dict(zip(("pU", "pSigma1", "pSigma2", "pTheta1", "pTheta2"), base))
        if example == 1:
            scheme = example1_scheme(kind, *base, channel=ch)
        else:
            scheme = example2_scheme(kind, *base, flip=flip, channel=ch)
            params["pFlip"] = flip
        if scheme.kind == "our":
            poly, d1, d2 = eval_inner_our(ch, scheme)
        else:
            poly, d1, d2 = eval_inner_awk(ch, scheme)
        label = kind if kind != "our" or example != 2 else "our-com"
        records.append(SweepRecord(
            label, tuple(sorted(params.items())), poly.r1, poly.r2,
            poly.sum12[0], poly.sum12[1], poly.feasible,
            tuple(sorted((k, v) for k, v in poly.slack.items())), d1, d2,
        ))
    return records


def sweep_example12(example, kind, grid=None, processes=None, channel=None):
    """Sweep one family of the first or second example; returns SweepResult.

    For the second example the common-only family carries the extra
    description-noise axis (its exact description is never feasible);
    elsewhere the description is the exact state function.
    """
    if example not in (1, 2):
        raise ArgumentError("sweep_example12 covers examples 1 and 2")
    grid = grid or Example12Grid()
    channel = channel or build_example(example)
    bases = list(itertools.product(grid.p_u, grid.p_s1, grid.p_s2, grid.p_t1, grid.p_t2))
    flips = grid.flips if (example == 2 and kind == "awk") else (0.0,)
    tasks = [(example, kind, b, flips) for b in bases]
    records = _run_tasks(channel, tasks, _ex12_worker, processes)
    records.sort(key=lambda r: r.params)
    label = records[0].kind if records else kind
    pts = [p for r in records if r.feasible for p in r.points()]
    return SweepResult(label, pts, records)


def random_common_scheme(channel, rng):
    """Random common-only scheme biased so the family has feasible members.

    On the fourth example transmitter 2's cooperation pipe is structurally
    closed (its partner's echo reveals nothing about U2), so V2 draws are
    mostly pure noise; V1 blends a random base with a deterministic echo
    function. Used by the inclusion-property checks.
    """
    p_u, p_s1, p_s2 = rng.random(3)
    p_t1 = rng.uniform(0, 0.15)
    p_t2 = rng.uniform(0, 0.5)

    def vk(tx, name, w):
        nx = channel.size_of(f"X{tx}")
        nz = channel.size_of(f"Z{tx}")
        base = rng.dirichlet(np.ones(2))
        probs = np.zeros((2, 2, 2, nx, nz, 2))
        fn_bit = int(rng.integers(0, 2))
        for idx in np.ndindex(2, 2, 2, nx, nz):
            x, z = idx[3], idx[4]
            det = np.zeros(2)
            det[(x ^ (z >> fn_bit)) & 1] = 1.0
            probs[idx] = (1 - w) * base + w * det
        return CondKernel(
            ("U", "U1", "U2", f"X{tx}", f"Z{tx}"), (name,), probs
        )

    w1 = rng.uniform(0, 0.25)
    w2 = 0.0 if rng.random() < 0.7 else rng.uniform(0, 0.05)
    return binary_xor_scheme(
        "awk", p_u, p_s1, p_s2, p_t1, p_t2,
        compress1=vk(1, "V1", w1), compress2=vk(2, "V2", w2),
    )


def _plain_worker(task):
    kind, base = task
    ch = _WORKER_CH
    scheme = binary_xor_scheme(kind, *base)
    if kind == "our":
        poly, d1, d2 = eval_inner_our(ch, scheme)
    else:
        poly, d1, d2 = eval_inner_awk(ch, scheme)
    params = dict(zip(("pU", "pSigma1", "pSigma2", "pTheta1", "pTheta2"), base))
    return [SweepRecord(
        kind, tuple(sorted(params.items())), poly.r1, poly.r2,
        poly.sum12[0], poly.sum12[1], poly.feasible,
        tuple(sorted(poly.slack.items())), d1, d2,
    )]


def sweep_no_compression(channel, kind, grid=None, processes=None):
    """Message-cooperation-only sweep (every description absent)."""
    if kind not in ("our", "awk"):
        raise ArgumentError("kind must be 'our' or 'awk'")
    grid = grid or Example12Grid()
    bases = list(itertools.product(grid.p_u, grid.p_s1, grid.p_s2, grid.p_t1, grid.p_t2))
    tasks = [(kind, b) for b in bases]
    records = _run_tasks(channel, tasks, _plain_worker, processes)
    records.sort(key=lambda r: r.params)
    pts = [p for r in records if r.feasible for p in r.points()]
    return SweepResult(kind, pts, records)
