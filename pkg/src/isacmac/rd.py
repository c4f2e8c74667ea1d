"""Constrained rate-distortion solver for sensing targets.

Computes f(D) = min I(target; estimate) over test kernels
P(estimate | conditioning vars) subject to E[d] <= D, where the
conditioning set always contains the target itself (so D = 0 is always
attainable when the estimate alphabet covers the target's).

Solver: alternating minimization over the Lagrangian I + lambda*E[d] in the
classic rate-distortion style, with an outer bisection on lambda to land on
the distortion budget. The per-row kernel update depends on a conditioning
symbol only through its distortion row, i.e. through the target coordinate,
so rows sharing a target symbol are aggregated before iterating; this is an
exact reformulation of the iteration, and the independent brute-force grid
search below cross-checks the optimum over unrestricted kernels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericalError, TooLargeError
from .prob import marginalize

RATE_TOL = 1e-12  # convergence threshold on successive rates, bits
MAX_ITERS = 10**5
_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class RdProblem:
    """Minimum-rate problem for one sensing target.

    source_joint: JointDist over (at least) the conditioning variables.
    cond_vars:    variables the test kernel may depend on; must include target.
    target:       the variable whose distortion is constrained.
    d:            DistortionFn with rows indexed by the target alphabet.
    """

    source_joint: object
    cond_vars: tuple
    target: str
    d: object

    def __post_init__(self):
        object.__setattr__(self, "cond_vars", tuple(self.cond_vars))
        if self.target not in self.cond_vars:
            raise ArgumentError("cond_vars must include the target")

    def tables(self):
        """(row weights P(w), target index per row, distortion row per w)."""
        marg = marginalize(self.source_joint, set(self.cond_vars))
        perm = [marg.names.index(n) for n in self.cond_vars]
        pw = np.transpose(marg.probs, perm).reshape(-1)
        sizes = [self.source_joint.size_of(n) for n in self.cond_vars]
        t_axis = self.cond_vars.index(self.target)
        s_of_w = np.array(
            [idx[t_axis] for idx in itertools.product(*[range(s) for s in sizes])]
        )
        if self.d.table.shape[0] != sizes[t_axis]:
            raise ArgumentError("distortion rows do not match the target alphabet")
        return pw, s_of_w, self.d.table[s_of_w]


@dataclass(frozen=True)
class RdCurvePoint:
    D: float
    R: float
    multiplier: float


def _aggregate(problem):
    """Collapse conditioning rows by target symbol: (P(s), distortion rows)."""
    pw, s_of_w, _ = problem.tables()
    n_s = problem.d.table.shape[0]
    ps = np.zeros(n_s)
    np.add.at(ps, s_of_w, pw)
    return ps, np.asarray(problem.d.table, dtype=float)


def _mi_of_kernel(ps, q):
    """I(target; estimate) for kernel rows q over the target alphabet."""
    joint = ps[:, None] * q
    pe = joint.sum(axis=0, keepdims=True)
    denom = ps[:, None] * pe
    mask = joint > 0
    ratio = np.ones_like(joint)
    np.divide(joint, denom, out=ratio, where=mask)
    return float(np.sum(joint[mask] * np.log2(ratio[mask])))


def _lagrangian_value(ps, weight, r):
    """V(r) = -sum_s p_s log2(sum_e r_e w[s,e]); min_r V(r) equals L(lam)."""
    z = weight @ r
    return float(ps @ (-np.log2(z)))


def _finish(ps, dmat, weight, r):
    q = r[None, :] * weight
    norm = q.sum(axis=1, keepdims=True)
    q = np.divide(q, norm, out=np.full_like(q, 1.0 / dmat.shape[1]), where=norm > 0)
    e = float(np.sum(ps[:, None] * q * dmat))
    return q, e, _mi_of_kernel(ps, q)


def _lagrangian_solve(ps, dmat, lam, r_init=None):
    """Minimize I + lam*E[d]; returns (kernel rows, E[d], rate).

    The minimum over kernels at fixed reproduction law r is available in
    closed form, leaving a convex program in r alone. A Kuhn-Tucker test
    dispatches the zero-rate corner exactly (alternating updates suffer
    critical slowing there); a binary estimate alphabet is solved by golden
    section on the remaining scalar, larger alphabets by the alternating
    updates with a certified duality-gap stop.
    """
    n_s, n_e = dmat.shape
    weight = np.exp(-lam * _LN2 * dmat)  # 2^(-lam*d)

    # corner test: a point mass on the best constant estimate is optimal
    # iff sum_s p_s w[s,e]/w[s,e*] <= 1 for every competing e
    const_dists = ps @ dmat
    e_star = int(np.argmin(const_dists))
    scores = ps @ (weight / weight[:, [e_star]])
    if np.all(scores <= 1.0 + 1e-12):
        q = np.zeros_like(dmat)
        q[:, e_star] = 1.0
        return q, float(const_dists[e_star]), 0.0

    if n_e == 2:
        lo, hi = 0.0, 1.0
        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - invphi * (hi - lo)
        x2 = lo + invphi * (hi - lo)
        f1 = _lagrangian_value(ps, weight, np.array([1 - x1, x1]))
        f2 = _lagrangian_value(ps, weight, np.array([1 - x2, x2]))
        for _ in range(120):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - invphi * (hi - lo)
                f1 = _lagrangian_value(ps, weight, np.array([1 - x1, x1]))
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + invphi * (hi - lo)
                f2 = _lagrangian_value(ps, weight, np.array([1 - x2, x2]))
        rho = 0.5 * (lo + hi)
        return _finish(ps, dmat, weight, np.array([1 - rho, rho]))

    r = np.full(n_e, 1.0 / n_e) if r_init is None else r_init.copy()
    r = np.clip(r, 1e-12, None)
    r /= r.sum()
    for it in range(MAX_ITERS):
        q = r[None, :] * weight
        norm = q.sum(axis=1, keepdims=True)
        q = np.divide(q, norm, out=np.full_like(q, 1.0 / n_e), where=norm > 0)
        r = ps @ q
        if it % 16 == 15:
            lower = _lagrangian_value(ps, weight, r)
            rate = _mi_of_kernel(ps, q)
            e = float(np.sum(ps[:, None] * q * dmat))
            if rate + lam * e - lower < RATE_TOL:
                break
    return _finish(ps, dmat, weight, r)


def rd_function(problem, D, *, with_multiplier=False):
    """f(D) in bits (solver accuracy ~1e-6); 0 when a constant estimate meets D."""
    if D < 0:
        raise ArgumentError(f"distortion budget {D} must be nonnegative")
    ps, dmat = _aggregate(problem)

    const_best = float(np.min(ps @ dmat))
    if D >= const_best - 1e-12:
        return (0.0, 0.0) if with_multiplier else 0.0

    floor = float(np.sum(ps * dmat.min(axis=1)))
    if D <= floor + 1e-15:
        q = np.zeros_like(dmat)
        q[np.arange(len(ps)), np.argmin(dmat, axis=1)] = 1.0
        rate = _mi_of_kernel(ps, q)
        return (rate, float("inf")) if with_multiplier else rate

    # expand lambda until the budget is met, then bisect on lambda
    lo, hi = 0.0, 1.0
    r_warm = None
    for _ in range(60):
        q, e, _ = _lagrangian_solve(ps, dmat, hi, r_warm)
        r_warm = ps @ q
        if e <= D:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NumericalError("lagrangian expansion failed to meet the budget")

    best = (_mi_of_kernel(ps, q), e, hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        q, e, rate = _lagrangian_solve(ps, dmat, mid, r_warm)
        r_warm = ps @ q
        if e <= D:
            hi = mid
            best = (rate, e, mid)
        else:
            lo = mid
        if abs(e - D) < 1e-12 or hi - lo < 1e-12:
            break
    rate, e, lam = best
    if e > D + 1e-9:
        raise NumericalError("rate-distortion bisection left the feasible side")
    rate = max(rate, 0.0)
    return (rate, lam) if with_multiplier else rate


def rd_curve(problem, grid):
    """Pointwise rd_function over an ascending grid, enforced nonincreasing."""
    grid = list(grid)
    if sorted(grid) != grid:
        raise ArgumentError("distortion grid must be ascending")
    points = []
    for D in grid:
        rate, lam = rd_function(problem, D, with_multiplier=True)
        points.append((D, rate, lam))
    rates = np.array([p[1] for p in points])
    if np.any(np.diff(rates) > 1e-7):
        raise NumericalError("rate-distortion curve increased beyond tolerance")
    rates = np.minimum.accumulate(rates)
    return [
        RdCurvePoint(D, float(r), lam) for (D, _, lam), r in zip(points, rates)
    ]


def brute_force_rd(problem, D, resolution, *, combo_cap=20_000_000):
    """Grid minimum of I(target;estimate) over the full kernel simplex.

    Enumerates every conditioning row independently (no row aggregation),
    upper-bounds rd_function, and converges to it as `resolution` grows.
    Refuses problems with more than 12 free kernel parameters.
    """
    pw, s_of_w, dmat = problem.tables()
    keep = pw > 0
    pw, s_of_w, dmat = pw[keep], s_of_w[keep], dmat[keep]
    n_rows, n_e = dmat.shape
    n_s = problem.d.table.shape[0]
    free = n_rows * (n_e - 1)
    if free > 12:
        raise TooLargeError(f"{free} kernel parameters exceed the brute-force cap (12)")

    cands = (
        np.array(list(_compositions(resolution, n_e)), dtype=float) / resolution
    )
    n_c = len(cands)
    total = n_c**n_rows
    if total > combo_cap:
        raise TooLargeError(f"{total} kernel grid points exceed the enumeration cap")

    row_e = pw[:, None] * (cands @ dmat.T).T  # (n_rows, n_c) weighted E contribution
    best = np.inf
    chunk = max(1, combo_cap // max(1, 4 * n_rows))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((len(idx), n_rows), dtype=np.int64)
        rem = idx
        for w in range(n_rows - 1, -1, -1):
            digits[:, w] = rem % n_c
            rem = rem // n_c
        e = np.zeros(len(idx))
        for w in range(n_rows):
            e += row_e[w, digits[:, w]]
        ok = e <= D + 1e-12
        if not np.any(ok):
            continue
        sel = digits[ok]
        joint = np.zeros((len(sel), n_s, n_e))
        for w in range(n_rows):
            joint[:, s_of_w[w], :] += pw[w] * cands[sel[:, w]]
        ps = joint.sum(axis=2, keepdims=True)
        pe = joint.sum(axis=1, keepdims=True)
        mask = joint > 0
        ratio = np.ones_like(joint)
        np.divide(joint, ps * pe, out=ratio, where=mask)
        rates = np.sum(np.where(mask, joint * np.log2(ratio), 0.0), axis=(1, 2))
        best = min(best, float(rates.min()))
    if not np.isfinite(best):
        raise NumericalError("no feasible kernel on the brute-force grid")
    return max(best, 0.0)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def min_distortion(problem, budget, *, tol=1e-9):
    """Smallest D with f(D) <= budget + tol, by bisection on D."""
    if rd_function(problem, 0.0) <= budget + tol:
        return 0.0
    ps, dmat = _aggregate(problem)
    hi = float(np.min(ps @ dmat))  # constant-estimate distortion, where f = 0
    lo = 0.0
    for _ in range(60):
        if hi - lo < 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if rd_function(problem, mid) <= budget + tol:
            hi = mid
        else:
            lo = mid
    return hi
