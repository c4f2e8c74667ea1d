"""Memoryless two-transmitter sensing channels over finite alphabets.

An `IsacChannel` bundles the i.i.d. state joint P(S, ST1, ST2, SR), the
channel kernel P(Y, Z1, Z2 | X1, X2, S), and one distortion table per
transmitter. X1/X2 are the channel inputs, Y the receiver output, Z1/Z2
the per-transmitter echo feedbacks, ST1/ST2 the sensing targets, and SR
the receiver's (possibly constant) side information.

The four bundled example channels are constructed programmatically from
their boolean/arithmetic definitions rather than from hand-typed tensors;
snapshot tests freeze each tensor. In every example the enlarged state S
is the tuple of all primitive noise bits, so the channel kernel is
deterministic given (X1, X2, S); the `derived` map exposes those primitive
bits (and tuple-output components) as named variables for reporting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, SchemaError
from .prob import CondKernel, JointDist, chain, marginalize, product

STATE_VARS = ("S", "ST1", "ST2", "SR")
CHANNEL_GIVEN = ("X1", "X2", "S")
CHANNEL_OUT = ("Y", "Z1", "Z2")
ALL_VARS = ("X1", "X2") + STATE_VARS + CHANNEL_OUT


@dataclass(frozen=True)
class DistortionFn:
    """Per-letter distortion table indexed by (true symbol, estimate symbol)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2 or np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ArgumentError("distortion table must be 2-D, finite, nonnegative")
        object.__setattr__(self, "table", t)

    @property
    def bound(self):
        return float(self.table.max())

    @property
    def n_estimates(self):
        return self.table.shape[1]


def hamming(n):
    return DistortionFn(1.0 - np.eye(n))


@dataclass(frozen=True)
class DerivedVar:
    """A deterministic function of channel variables, exposed under a name."""

    name: str
    sources: tuple
    table: np.ndarray  # symbol index per source assignment
    size: int

    def kernel(self, source_sizes):
        probs = np.zeros(tuple(source_sizes) + (self.size,))
        for idx in np.ndindex(*source_sizes):
            probs[idx + (int(self.table[idx]),)] = 1.0
        return CondKernel(self.sources, (self.name,), probs, validate=False)


@dataclass
class IsacChannel:
    name: str
    alphabets: dict  # var name -> size for ALL_VARS
    state: JointDist  # over (S, ST1, ST2, SR)
    kernel: CondKernel  # (Y, Z1, Z2 | X1, X2, S)
    d1: DistortionFn
    d2: DistortionFn
    derived: dict = field(default_factory=dict)  # name -> DerivedVar

    def __post_init__(self):
        if self.state.names != STATE_VARS:
            raise SchemaError(f"state joint must cover {STATE_VARS}")
        if self.kernel.given_names != CHANNEL_GIVEN or self.kernel.out_names != CHANNEL_OUT:
            raise SchemaError("channel kernel must be (Y,Z1,Z2 | X1,X2,S)")
        for var, size in zip(STATE_VARS, self.state.sizes):
            if self.alphabets.get(var) != size:
                raise SchemaError(f"alphabet mismatch on {var}")
        for var, size in zip(CHANNEL_GIVEN + CHANNEL_OUT, self.kernel.probs.shape):
            if self.alphabets.get(var) != size:
                raise SchemaError(f"alphabet mismatch on {var}")
        if self.d1.table.shape[0] != self.alphabets["ST1"]:
            raise SchemaError("distortion1 rows must match ST1 alphabet")
        if self.d2.table.shape[0] != self.alphabets["ST2"]:
            raise SchemaError("distortion2 rows must match ST2 alphabet")

    def size_of(self, var):
        return self.alphabets[var]


def assemble_joint(channel, input_dist, extra=()):
    """Full joint over inputs/auxiliaries, state variables, and outputs.

    `input_dist` must contain X1 and X2 (plus any auxiliaries) and is
    independent of the state, matching the single-letter factorizations
    evaluated by the region modules. `extra` kernels are chained in order
    after the channel outputs.
    """
    for required in ("X1", "X2"):
        if required not in input_dist.names:
            raise SchemaError(f"input distribution lacks {required}")
        if input_dist.size_of(required) != channel.alphabets[required]:
            raise SchemaError(f"alphabet mismatch on {required}")
    overlap = set(input_dist.names) & set(STATE_VARS + CHANNEL_OUT)
    if overlap:
        raise SchemaError(f"input distribution may not contain {sorted(overlap)}")
    joint = product(input_dist, channel.state)
    joint = chain(joint, channel.kernel)
    for k in extra:
        joint = chain(joint, k)
    return joint


def expand_derived(channel, joint, names=None):
    """Chain the channel's derived component variables onto `joint`."""
    todo = channel.derived if names is None else {n: channel.derived[n] for n in names}
    for dv in todo.values():
        if dv.name in joint.names:
            continue
        sizes = tuple(joint.size_of(s) for s in dv.sources)
        joint = chain(joint, dv.kernel(sizes))
    return joint


def uniform_inputs(channel, p1=None, p2=None):
    """Product input distribution; binary inputs take P(X=1) overrides."""
    dists = []
    for var, p in (("X1", p1), ("X2", p2)):
        n = channel.alphabets[var]
        if p is None:
            probs = np.full(n, 1.0 / n)
        else:
            probs = np.asarray(p, dtype=float)
            if probs.ndim == 0:
                if n != 2:
                    raise ArgumentError(f"scalar bias given for non-binary {var}")
                probs = np.array([1.0 - float(p), float(p)])
            if probs.size != n:
                raise ArgumentError(f"input pmf for {var} must have {n} entries")
        dists.append(JointDist((var,), probs))
    return product(*dists)


# ---------------------------------------------------------------------------
# Example channels
# ---------------------------------------------------------------------------

def _tuple_state(bit_names, biases):
    """State joint over the packed tuple of independent bits, plus a decoder."""
    n = len(bit_names)
    size = 2**n
    probs = np.zeros(size)
    for bits in itertools.product((0, 1), repeat=n):
        idx = 0
        for b in bits:
            idx = idx * 2 + b
        p = 1.0
        for b, q in zip(bits, biases):
            p *= q if b else (1.0 - q)
        probs[idx] = p

    def bit_of(s, pos):
        return (s >> (n - 1 - pos)) & 1

    return probs, bit_of


def _pack(*vals):
    out = 0
    for v in vals:
        out = out * 2 + v
    return out


def _build_channel(name, bit_names, biases, st1_bit, st2_bit, out_defs, derived_defs,
                   y_size, z1_size, z2_size):
    """Shared constructor: packed-bit state, deterministic outputs.

    out_defs: (y_fn, z1_fn, z2_fn), each taking (x1, x2, bits dict) -> symbol.
    derived_defs: list of (name, sources, size, fn over source symbols).
    """
    state_probs, bit_of = _tuple_state(bit_names, biases)
    s_size = state_probs.size
    n = len(bit_names)

    state = np.zeros((s_size, 2, 2, 1))
    for s in range(s_size):
        bits = {bn: bit_of(s, i) for i, bn in enumerate(bit_names)}
        state[s, bits[st1_bit], bits[st2_bit], 0] = state_probs[s]
    state_joint = JointDist(STATE_VARS, state)

    y_fn, z1_fn, z2_fn = out_defs
    kern = np.zeros((2, 2, s_size, y_size, z1_size, z2_size))
    for x1, x2, s in itertools.product(range(2), range(2), range(s_size)):
        bits = {bn: bit_of(s, i) for i, bn in enumerate(bit_names)}
        kern[x1, x2, s, y_fn(x1, x2, bits), z1_fn(x1, x2, bits), z2_fn(x1, x2, bits)] = 1.0
    kernel = CondKernel(CHANNEL_GIVEN, CHANNEL_OUT, kern, validate=False)

    alphabets = {
        "X1": 2, "X2": 2, "S": s_size, "ST1": 2, "ST2": 2, "SR": 1,
        "Y": y_size, "Z1": z1_size, "Z2": z2_size,
    }

    derived = {}
    # every primitive state bit is exposed as a derived variable of S
    for i, bn in enumerate(bit_names):
        table = np.array([bit_of(s, i) for s in range(s_size)])
        derived[bn] = DerivedVar(bn, ("S",), table, 2)
    for dname, sources, size, fn in derived_defs:
        sizes = tuple(alphabets[s] for s in sources)
        table = np.zeros(sizes, dtype=int)
        for idx in np.ndindex(*sizes):
            table[idx] = fn(*idx)
        derived[dname] = DerivedVar(dname, tuple(sources), table, size)

    return IsacChannel(
        name=name,
        alphabets=alphabets,
        state=state_joint,
        kernel=kernel,
        d1=hamming(2),
        d2=hamming(2),
        derived=derived,
    )


def build_example(n):
    """The four bundled binary-input example channels (1..4)."""
    if n == 1:
        # Y = (X1^S1, X2^S2), Z1 = X1^S2, Z2 = X2^S1; targets ST1=S2, ST2=S1.
        return _build_channel(
            "example1", ("S1", "S2"), (0.11, 0.11), st1_bit="S2", st2_bit="S1",
            out_defs=(
                lambda x1, x2, b: _pack(x1 ^ b["S1"], x2 ^ b["S2"]),
                lambda x1, x2, b: x1 ^ b["S2"],
                lambda x1, x2, b: x2 ^ b["S1"],
            ),
            derived_defs=[
                ("Y1", ("Y",), 2, lambda y: y >> 1),
                ("Y2", ("Y",), 2, lambda y: y & 1),
            ],
            y_size=4, z1_size=2, z2_size=2,
        )
    if n == 2:
        # Y = (X1^S1^N, X2^S2), Z1 = (X1^S1, X1^S2), Z2 = X1^B; N is a fair bit.
        return _build_channel(
            "example2", ("S1", "S2", "N", "B"), (0.11, 0.11, 0.5, 0.11),
            st1_bit="S2", st2_bit="S1",
            out_defs=(
                lambda x1, x2, b: _pack(x1 ^ b["S1"] ^ b["N"], x2 ^ b["S2"]),
                lambda x1, x2, b: _pack(x1 ^ b["S1"], x1 ^ b["S2"]),
                lambda x1, x2, b: x1 ^ b["B"],
            ),
            derived_defs=[
                ("Y1", ("Y",), 2, lambda y: y >> 1),
                ("Y2", ("Y",), 2, lambda y: y & 1),
                ("Z11", ("Z1",), 2, lambda z: z >> 1),
                ("Z12", ("Z1",), 2, lambda z: z & 1),
            ],
            y_size=4, z1_size=4, z2_size=2,
        )
    if n == 3:
        # Ternary superposition output Y = S1*X1 + S2*X2; Zk = Xk^Sk.
        return _build_channel(
            "example3", ("S1", "S2"), (0.11, 0.11), st1_bit="S2", st2_bit="S1",
            out_defs=(
                lambda x1, x2, b: b["S1"] * x1 + b["S2"] * x2,
                lambda x1, x2, b: x1 ^ b["S1"],
                lambda x1, x2, b: x2 ^ b["S2"],
            ),
            derived_defs=[],
            y_size=3, z1_size=2, z2_size=2,
        )
    if n == 4:
        return build_example4_variant()
    raise ArgumentError(f"example index {n} outside 1..4")


def build_example4_variant(p_s1=0.24, p_s2=0.05, p_n=0.3, p_b=0.5):
    """The fourth example with overridable noise biases (sensitivity tests)."""
    # Y = (X1^S1, X2^S2), Z1 = X1^N, Z2 = (B*X1, X2^S1); both targets are N.
    return _build_channel(
            "example4", ("S1", "S2", "N", "B"), (p_s1, p_s2, p_n, p_b),
            st1_bit="N", st2_bit="N",
            out_defs=(
                lambda x1, x2, b: _pack(x1 ^ b["S1"], x2 ^ b["S2"]),
                lambda x1, x2, b: x1 ^ b["N"],
                lambda x1, x2, b: _pack(b["B"] * x1, x2 ^ b["S1"]),
            ),
            derived_defs=[
                ("Y1", ("Y",), 2, lambda y: y >> 1),
                ("Y2", ("Y",), 2, lambda y: y & 1),
                ("BX1", ("Z2",), 2, lambda z: z >> 1),
                ("Z22", ("Z2",), 2, lambda z: z & 1),
            ],
            y_size=4, z1_size=2, z2_size=4,
        )


def state_bit_marginal(channel, bit_name):
    """P(bit=1) for a primitive state bit exposed in `derived`."""
    dv = channel.derived[bit_name]
    s_marg = marginalize(channel.state, {"S"}).probs
    return float(sum(p for s, p in enumerate(s_marg) if dv.table[s] == 1))
