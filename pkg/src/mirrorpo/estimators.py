"""Policy-gradient estimators.

Every estimator stores an *ascent* estimate of grad J.  Descent-form
negations belong to the training loops in :mod:`mirrorpo.algorithms`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from mirrorpo.mdp import Trajectory, discounted_return
from mirrorpo.policy import SoftmaxLinearPolicy, score_matrix

logger = logging.getLogger(__name__)

LOG_WEIGHT_CLAMP = 50.0


class EstimatorKind(str, enum.Enum):
    VANILLA = "vanilla"
    MPO_AVERAGE = "mpo_average"
    VRMPO_RECURSIVE = "vrmpo_recursive"
    SVRPG_IS = "svrpg_is"


@dataclass(frozen=True, eq=False)
class EstimatorState:
    kind: EstimatorKind
    value: np.ndarray
    count: int = 0
    prev_theta: np.ndarray | None = None
    anchor_theta: np.ndarray | None = None
    anchor_value: np.ndarray | None = None


def score_sum(traj: Trajectory, policy: SoftmaxLinearPolicy) -> np.ndarray:
    """sum_t grad log pi_theta(a_t | s_t) along ``traj``."""
    if traj.horizon == 0:
        return np.zeros(policy.dim)
    sc = score_matrix(policy)
    return sc[traj.states, traj.actions].sum(axis=0)


def vanilla_gradient(traj: Trajectory, policy: SoftmaxLinearPolicy, gamma: float) -> np.ndarray:
    """g(tau | theta) = (sum_t grad log pi(a_t|s_t)) * R(tau)."""
    return score_sum(traj, policy) * discounted_return(traj, gamma)


def batch_gradient(trajs: Sequence[Trajectory], policy: SoftmaxLinearPolicy,
                   gamma: float) -> np.ndarray:
    """Mean of :func:`vanilla_gradient`, summed in list order."""
    if not trajs:
        raise ValueError("empty trajectory batch")
    sc = score_matrix(policy)
    total = np.zeros(policy.dim)
    for tr in trajs:
        if tr.horizon:
            total += sc[tr.states, tr.actions].sum(axis=0) * discounted_return(tr, gamma)
    return total / len(trajs)


def _correction(trajs, theta_now: SoftmaxLinearPolicy, theta_prev: SoftmaxLinearPolicy,
                gamma, weights=None) -> np.ndarray:
    # mean over the batch of g(tau|now) - w(tau) g(tau|prev) on shared trajectories
    sc_now = score_matrix(theta_now)
    sc_prev = score_matrix(theta_prev)
    total = np.zeros(theta_now.dim)
    for j, tr in enumerate(trajs):
        if not tr.horizon:
            continue
        R = discounted_return(tr, gamma)
        w = 1.0 if weights is None else weights[j]
        total += R * (sc_now[tr.states, tr.actions].sum(axis=0)
                      - w * sc_prev[tr.states, tr.actions].sum(axis=0))
    return total / len(trajs)


# --- MPO running average --------------------------------------------------

def mpo_init(dim: int) -> EstimatorState:
    return EstimatorState(EstimatorKind.MPO_AVERAGE, np.zeros(dim), 0)


def mpo_absorb(state: EstimatorState, g_new) -> EstimatorState:
    """Fold one more episode gradient into the running mean.

    ``value_k = value_{k-1} + (g_k - value_{k-1}) / k``, so after k calls the
    value is the arithmetic mean of every absorbed gradient.
    """
    if state.kind is not EstimatorKind.MPO_AVERAGE:
        raise ValueError(f"mpo_absorb needs an MPO_AVERAGE state, got {state.kind}")
    g_new = np.asarray(g_new, dtype=float)
    k = state.count + 1
    return replace(state, value=state.value + (g_new - state.value) / k, count=k)


# --- VRMPO recursion ------------------------------------------------------

def vrmpo_init(trajs: Sequence[Trajectory], policy: SoftmaxLinearPolicy,
               gamma: float) -> EstimatorState:
    """Batch estimate at the start of an epoch."""
    if len(trajs) == 0:
        raise ValueError("vrmpo_init needs at least one trajectory")
    return EstimatorState(EstimatorKind.VRMPO_RECURSIVE, batch_gradient(trajs, policy, gamma),
                          len(trajs), prev_theta=policy.theta.copy())


def vrmpo_recursive_update(state: EstimatorState, trajs: Sequence[Trajectory],
                           policy_now: SoftmaxLinearPolicy, gamma: float) -> EstimatorState:
    """value += mean_j [g(tau_j | theta_t) - g(tau_j | theta_{t-1})].

    Both terms are evaluated on the same trajectories (sampled under
    ``policy_now``); only the scores change, the return is shared.
    """
    if state.kind is not EstimatorKind.VRMPO_RECURSIVE:
        raise ValueError(f"expected a VRMPO_RECURSIVE state, got {state.kind}")
    if state.prev_theta is None or state.prev_theta.shape != policy_now.theta.shape:
        raise ValueError("previous parameters missing or of the wrong dimension")
    if len(trajs) == 0:
        raise ValueError("empty trajectory batch")
    if np.array_equal(state.prev_theta, policy_now.theta):
        value = state.value
    else:
        prev = policy_now.with_theta(state.prev_theta)
        value = state.value + _correction(trajs, policy_now, prev, gamma)
    return replace(state, value=value, count=state.count + len(trajs),
                   prev_theta=policy_now.theta.copy())


# --- SVRPG with importance weights ---------------------------------------

def svrpg_init(trajs: Sequence[Trajectory], policy: SoftmaxLinearPolicy,
               gamma: float) -> EstimatorState:
    """Snapshot estimate; the snapshot parameters anchor the importance weights."""
    if len(trajs) == 0:
        raise ValueError("svrpg_init needs at least one trajectory")
    g = batch_gradient(trajs, policy, gamma)
    return EstimatorState(EstimatorKind.SVRPG_IS, g, len(trajs),
                          prev_theta=policy.theta.copy(), anchor_theta=policy.theta.copy(),
                          anchor_value=g.copy())


def log_importance_weight(traj: Trajectory, policy_anchor: SoftmaxLinearPolicy,
                          policy_now: SoftmaxLinearPolicy) -> float:
    """sum_h log pi_anchor(a_h|s_h) - log pi_now(a_h|s_h)."""
    if not traj.horizon:
        return 0.0
    lp_a = _log_table(policy_anchor)[traj.states, traj.actions]
    lp_n = _log_table(policy_now)[traj.states, traj.actions]
    if np.any(np.isinf(lp_n)):
        raise FloatingPointError("action has zero probability under the current policy")
    return float(np.sum(lp_a - lp_n))


def _log_table(policy: SoftmaxLinearPolicy) -> np.ndarray:
    logits = policy.features @ policy.theta
    m = logits.max(axis=-1, keepdims=True)
    return logits - m - np.log(np.exp(logits - m).sum(axis=-1, keepdims=True))


def importance_weight(traj: Trajectory, policy_anchor: SoftmaxLinearPolicy,
                      policy_now: SoftmaxLinearPolicy) -> float:
    """prod_h pi_anchor / pi_now, with the log clamped to +-LOG_WEIGHT_CLAMP."""
    lw = log_importance_weight(traj, policy_anchor, policy_now)
    if abs(lw) > LOG_WEIGHT_CLAMP:
        logger.warning("importance log-weight %.3g clamped to +-%g", lw, LOG_WEIGHT_CLAMP)
        lw = math.copysign(LOG_WEIGHT_CLAMP, lw)
    return math.exp(lw)


def svrpg_is_update(state: EstimatorState, trajs: Sequence[Trajectory],
                    policy_now: SoftmaxLinearPolicy, gamma: float) -> EstimatorState:
    """value = anchor_value + mean_j [g(tau_j|theta_t) - rho_j g(tau_j|theta_{t-1})]
    with rho_j = prod_h pi_anchor(a_h|s_h) / pi_{theta_t}(a_h|s_h)."""
    if state.kind is not EstimatorKind.SVRPG_IS:
        raise ValueError(f"expected an SVRPG_IS state, got {state.kind}")
    if state.anchor_theta is None or state.anchor_theta.shape != policy_now.theta.shape:
        raise ValueError("anchor parameters missing or of the wrong dimension")
    if len(trajs) == 0:
        raise ValueError("empty trajectory batch")
    anchor = policy_now.with_theta(state.anchor_theta)
    prev = policy_now.with_theta(state.prev_theta)
    weights = [importance_weight(tr, anchor, policy_now) for tr in trajs]
    value = state.anchor_value + _correction(trajs, policy_now, prev, gamma, weights)
    return replace(state, value=value, count=state.count + len(trajs),
                   prev_theta=policy_now.theta.copy())


# --- diagnostics ----------------------------------------------------------

def estimator_deviation_bound(traj: Trajectory, policy: SoftmaxLinearPolicy, gamma: float,
                              exact_grad) -> float:
    """||g(tau|theta) - grad J(theta)||^2 for one trajectory."""
    d = vanilla_gradient(traj, policy, gamma) - np.asarray(exact_grad, dtype=float)
    return float(d @ d)


def triangle_deviation_bound(horizon: int, g_norm: float, return_bound: float) -> float:
    """(2 (H + 1) G_norm |R|_max)^2, a crude cap on the squared deviation when
    ``horizon`` bounds every trajectory length and ``g_norm`` every score norm."""
    return (2.0 * (horizon + 1) * g_norm * return_bound) ** 2
