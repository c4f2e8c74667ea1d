"""Exact probability algebra over named finite variables.

Dense joint tensors indexed by one axis per variable, with marginalization,
conditioning, kernel chaining, and entropy / mutual information in bits
(base-2 logs, 0*log 0 = 0). Alphabets in this package are tiny, so dense
storage is both simpler and faster than anything sparse; joints are capped
at MAX_CELLS entries.

A size-1 alphabet models an absent/constant variable, so formulas that
mention optional auxiliaries evaluate uniformly without special cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateEventError,
    NumericalError,
    SizeLimitError,
    UnknownVariableError,
)

SUM_TOL = 1e-12
MAX_CELLS = 10**8
# Mutual information more negative than this indicates a real bug, not round-off.
MI_SANITY_FLOOR = -1e-9

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class Alphabet:
    """A named finite alphabet; symbols are the indices 0..size-1."""

    name: str
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ArgumentError(f"alphabet {self.name!r} must have size >= 1")


def _as_prob_tensor(probs, what):
    arr = np.asarray(probs, dtype=float)
    if arr.size > MAX_CELLS:
        raise SizeLimitError(f"{what} would hold {arr.size} cells (cap {MAX_CELLS})")
    if arr.size and arr.min() < -SUM_TOL:
        raise ArgumentError(f"{what} has negative entries (min {arr.min()})")
    return np.clip(arr, 0.0, None)


class JointDist:
    """A joint pmf over an ordered tuple of named variables."""

    __slots__ = ("names", "probs")

    def __init__(self, names, probs, *, validate=True):
        names = tuple(names)
        if validate:
            probs = _as_prob_tensor(probs, "joint")
        else:
            probs = np.asarray(probs, dtype=float)
        if probs.ndim != len(names):
            raise ArgumentError(
                f"{len(names)} variable names for a {probs.ndim}-axis tensor"
            )
        if len(set(names)) != len(names):
            raise UnknownVariableError(f"duplicate variable names in {names}")
        if validate:
            total = probs.sum()
            if abs(total - 1.0) > 1e-9:
                raise ArgumentError(f"joint sums to {total}, expected 1")
            if abs(total - 1.0) > SUM_TOL:
                probs = probs / total
        self.names = names
        self.probs = probs

    @property
    def sizes(self):
        return self.probs.shape

    def size_of(self, name):
        return self.probs.shape[self.axis(name)]

    def axis(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(
                f"unknown variable {name!r}; have {self.names}"
            ) from None

    def __eq__(self, other):
        return (
            isinstance(other, JointDist)
            and self.names == other.names
            and self.probs.shape == other.probs.shape
            and np.array_equal(self.probs, other.probs)
        )

    def __repr__(self):
        dims = ",".join(f"{n}:{s}" for n, s in zip(self.names, self.probs.shape))
        return f"JointDist({dims})"


class CondKernel:
    """A conditional pmf P(out_names | given_names).

    The tensor is indexed given-axes first, then out-axes; every given-slice
    sums to one.
    """

    __slots__ = ("given_names", "out_names", "probs")

    def __init__(self, given_names, out_names, probs, *, validate=True):
        self.given_names = tuple(given_names)
        self.out_names = tuple(out_names)
        if validate:
            probs = _as_prob_tensor(probs, "kernel")
        else:
            probs = np.asarray(probs, dtype=float)
        if probs.ndim != len(self.given_names) + len(self.out_names):
            raise ArgumentError("kernel tensor rank does not match variable lists")
        names = self.given_names + self.out_names
        if len(set(names)) != len(names):
            raise UnknownVariableError(f"duplicate variable names in kernel {names}")
        if validate and probs.size:
            out_axes = tuple(range(len(self.given_names), probs.ndim))
            slice_sums = probs.sum(axis=out_axes)
            if not np.allclose(slice_sums, 1.0, atol=1e-9, rtol=0.0):
                bad = float(np.abs(slice_sums - 1.0).max())
                raise ArgumentError(f"kernel slices deviate from 1 by {bad}")
            if np.abs(slice_sums - 1.0).max() > SUM_TOL:
                probs = probs / np.expand_dims(slice_sums, out_axes)
        self.probs = probs

    @property
    def given_sizes(self):
        return self.probs.shape[: len(self.given_names)]

    @property
    def out_sizes(self):
        return self.probs.shape[len(self.given_names):]

    def __repr__(self):
        g = ",".join(self.given_names)
        o = ",".join(self.out_names)
        return f"CondKernel({o}|{g})"


def deterministic_kernel(given_names, given_sizes, out_name, out_size, fn):
    """Kernel for out = fn(*given symbols), as a 0/1 tensor."""
    probs = np.zeros(tuple(given_sizes) + (out_size,))
    for idx in np.ndindex(*given_sizes):
        probs[idx + (int(fn(*idx)),)] = 1.0
    return CondKernel(given_names, (out_name,), probs, validate=False)


def bernoulli(name, p1):
    if not 0.0 <= p1 <= 1.0:
        raise ArgumentError(f"P({name}=1) = {p1} outside [0,1]")
    return JointDist((name,), np.array([1.0 - p1, p1]), validate=False)


def singleton(name):
    """The constant variable (size-1 alphabet)."""
    return JointDist((name,), np.ones(1), validate=False)


def product(*dists):
    """Independent product of joints over disjoint variable sets."""
    names = ()
    probs = np.ones(())
    for d in dists:
        overlap = set(names) & set(d.names)
        if overlap:
            raise UnknownVariableError(f"variable collision in product: {overlap}")
        probs = np.multiply.outer(probs, d.probs)
        names = names + d.names
    if probs.size > MAX_CELLS:
        raise SizeLimitError(f"product joint would hold {probs.size} cells")
    return JointDist(names, probs, validate=False)


def marginalize(d, keep):
    """Sum out every variable not in `keep`, preserving original order."""
    keep = set(keep)
    unknown = keep - set(d.names)
    if unknown:
        raise UnknownVariableError(f"unknown variables {sorted(unknown)}")
    if not keep:
        raise ArgumentError("must keep at least one variable")
    drop_axes = tuple(i for i, n in enumerate(d.names) if n not in keep)
    kept = tuple(n for n in d.names if n in keep)
    return JointDist(kept, d.probs.sum(axis=drop_axes), validate=False)


def condition(d, on):
    """Normalized slice of `d` at the assignment `on` (a name->symbol dict).

    The conditioned variables are removed from the result.
    """
    if not on:
        return d
    index = [slice(None)] * len(d.names)
    for name, symbol in on.items():
        ax = d.axis(name)
        size = d.probs.shape[ax]
        if not 0 <= int(symbol) < size:
            raise ArgumentError(f"symbol {symbol} outside alphabet of {name!r}")
        index[ax] = int(symbol)
    sliced = d.probs[tuple(index)]
    mass = sliced.sum()
    if mass <= 0.0:
        raise DegenerateEventError(f"conditioning event {on} has probability 0")
    kept = tuple(n for n in d.names if n not in on)
    probs = sliced / mass
    if not kept:
        # Full assignment: report the (trivial) point mass on a unit variable.
        return JointDist(("_point",), np.array([1.0]), validate=False)
    return JointDist(kept, probs, validate=False)


def chain(prior, kernel):
    """Extend `prior` with `kernel`: P(prior, out) = P(prior) * P(out|given).

    `kernel.given_names` must already be present in the prior and the output
    variables must be new; the result's marginal over the prior's variables
    equals the prior.
    """
    for g in kernel.given_names:
        if g not in prior.names:
            raise UnknownVariableError(f"kernel conditions on missing {g!r}")
    for o in kernel.out_names:
        if o in prior.names:
            raise UnknownVariableError(f"variable collision on {o!r}")
    for g, size in zip(kernel.given_names, kernel.given_sizes):
        if prior.size_of(g) != size:
            raise ArgumentError(
                f"size mismatch on {g!r}: prior {prior.size_of(g)}, kernel {size}"
            )
    n_out = len(kernel.out_names)
    if prior.probs.size * int(np.prod(kernel.out_sizes, dtype=np.int64) or 1) > MAX_CELLS:
        raise SizeLimitError("chained joint would exceed the size cap")

    prior_sub = _LETTERS[: len(prior.names)]
    out_sub = _LETTERS[len(prior.names): len(prior.names) + n_out]
    kern_sub = "".join(prior_sub[prior.axis(g)] for g in kernel.given_names) + out_sub
    expr = f"{prior_sub},{kern_sub}->{prior_sub}{out_sub}"
    probs = np.einsum(expr, prior.probs, kernel.probs)
    return JointDist(prior.names + kernel.out_names, probs, validate=False)


def _plogp_sum(p):
    out = np.zeros_like(p)
    np.log2(p, out=out, where=p > 0)
    return float(np.sum(p * out))


def subset_entropy(d, subset):
    """Joint entropy H(subset) in bits."""
    subset = set(subset)
    if not subset:
        return 0.0
    marg = marginalize(d, subset)
    return -_plogp_sum(marg.probs)


def entropy(d, of, given=()):
    """Conditional entropy H(of | given) in bits; always >= 0."""
    of, given = set(of), set(given)
    if of & given:
        raise ArgumentError(f"overlapping variable sets {of & given}")
    if not of:
        return 0.0
    h = subset_entropy(d, of | given) - subset_entropy(d, given)
    return max(h, 0.0)


def mutual_info(d, a, b, given=()):
    """Conditional mutual information I(a;b|given) in bits, clamped at 0.

    Round-off can push the value a hair below zero; anything below the
    sanity floor means the inputs were inconsistent.
    """
    a, b, given = set(a), set(b), set(given)
    if (a & b) or (a & given) or (b & given):
        raise ArgumentError("a, b, given must be pairwise disjoint")
    if not a or not b:
        return 0.0
    value = (
        subset_entropy(d, a | given)
        + subset_entropy(d, b | given)
        - subset_entropy(d, a | b | given)
        - subset_entropy(d, given)
    )
    if value < MI_SANITY_FLOOR:
        raise NumericalError(f"mutual information {value} below sanity floor")
    return max(value, 0.0)


def binary_entropy(p):
    """h(p) = -p log2 p - (1-p) log2 (1-p), elementwise."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-15) or np.any(p > 1 + 1e-15):
        raise ArgumentError("binary_entropy argument outside [0,1]")
    p = np.clip(p, 0.0, 1.0)
    q = 1.0 - p
    out = np.zeros_like(p)
    np.add(
        -p * np.log2(p, out=np.zeros_like(p), where=p > 0),
        -q * np.log2(q, out=np.zeros_like(q), where=q > 0),
        out=out,
    )
    return out if out.ndim else float(out)
