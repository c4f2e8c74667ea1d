"""Optimal symbol-wise state estimation and exact expected distortion.

Given a joint law over observation variables and a target variable, the
optimal map sends each observable assignment to the estimate minimizing the
posterior expected distortion. Ties break toward the lowest estimate index
and zero-probability observations map to symbol 0, so tables are
reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownVariableError
from .prob import marginalize


@dataclass(frozen=True)
class EstimatorMap:
    obs_vars: tuple
    table: np.ndarray  # estimate symbol per observation assignment
    n_estimates: int


def _obs_target_marginal(joint, obs, target):
    """P(obs..., target) with axes ordered as (sorted obs tuple, target)."""
    if target in obs:
        raise UnknownVariableError(f"target {target!r} may not be observed")
    if target not in joint.names:
        raise UnknownVariableError(f"target {target!r} not in joint")
    obs = tuple(n for n in joint.names if n in set(obs))
    marg = marginalize(joint, set(obs) | {target})
    order = obs + (target,)
    perm = [marg.names.index(n) for n in order]
    return obs, np.transpose(marg.probs, perm)


def optimal_estimator(joint, obs, target, d):
    """Arg-min-posterior-distortion map from `obs` assignments to estimates."""
    obs, pot = _obs_target_marginal(joint, obs, target)
    # expected distortion of each candidate estimate, per observation cell
    exp_d = pot @ d.table  # (..., n_est)
    table = np.argmin(exp_d, axis=-1)
    table[pot.sum(axis=-1) == 0] = 0
    return EstimatorMap(obs, table, d.n_estimates)


def expected_distortion(joint, est, target, d):
    """E[d(target, est(obs))] under `joint`; lies in [0, d.bound]."""
    obs, pot = _obs_target_marginal(joint, est.obs_vars, target)
    if obs != tuple(est.obs_vars):
        # estimator tables are bound to a fixed observation order
        perm_pot = np.transpose(
            pot, [obs.index(n) for n in est.obs_vars] + [pot.ndim - 1]
        )
        pot = perm_pot
    cols = d.table.T[est.table]  # (..., n_true): distortion row of chosen estimate
    return float(np.sum(pot * cols))


def estimator_kernel(est, name, obs_sizes):
    """The estimator as a deterministic kernel, for joining estimates into joints."""
    from .prob import CondKernel

    probs = np.zeros(tuple(obs_sizes) + (est.n_estimates,))
    for idx in np.ndindex(*obs_sizes):
        probs[idx + (int(est.table[idx]),)] = 1.0
    return CondKernel(tuple(est.obs_vars), (name,), probs, validate=False)
