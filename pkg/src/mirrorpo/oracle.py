"""Ground truth for small MDPs.

Two independent routes to every exact quantity:

* exhaustive trajectory enumeration (:func:`enumerate_trajectories`), which
  sums the per-trajectory estimator against ``P(tau | theta)`` exactly, and
* linear solves on the policy-induced Markov chain (:func:`exact_return`,
  :func:`exact_gradient` with ``method="linear"``).

The enumeration tree depends only on the MDP's support, so it is built once
and re-weighted for any parameter vector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from mirrorpo.mdp import Mdp, Trajectory, make_short_corridor, LEFT, RIGHT
from mirrorpo.estimators import triangle_deviation_bound
from mirrorpo.policy import SoftmaxLinearPolicy, deviation_bound_sq, score_matrix

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 10 ** 7


class CapacityError(RuntimeError):
    """Enumeration would exceed the branching guard."""


class DivergenceError(ArithmeticError):
    """The policy-induced chain does not terminate, so the value is not finite."""


# --- enumeration ---------------------------------------------------------

@dataclass
class _Level:
    parent: np.ndarray      # index into the previous level (-1 at depth 0)
    state: np.ndarray
    action: np.ndarray
    next_state: np.ndarray
    reward: np.ndarray
    log_env: np.ndarray     # log rho0(s0) at depth 0 plus log P(s'|s, a)
    leaf: np.ndarray        # trajectory ends at this node
    truncated: np.ndarray   # leaf created by the h_max cap
    tail: np.ndarray        # cut by horizon_cap before termination


class TrajectoryTree:
    """All trajectories of ``mdp`` up to ``horizon_cap`` steps, as a prefix tree."""

    def __init__(self, mdp: Mdp, horizon_cap: int, max_paths: int = MAX_ENUMERATION):
        self.mdp = mdp
        self.horizon_cap = int(horizon_cap)
        if self.horizon_cap < 1:
            raise ValueError("horizon_cap must be >= 1")
        S, A = mdp.num_states, mdp.num_actions
        P = mdp.transition
        branches = [[(a, s2) for a in range(A) for s2 in range(S + 1) if P[s, a, s2] > 0]
                    for s in range(S)]
        cont = [sum(1 for a, s2 in br if s2 < S) for br in branches]
        self.branching = max(cont) if cont else 0
        n_init = int(np.count_nonzero(mdp.initial_dist))
        depth = min(self.horizon_cap, mdp.h_max)
        self.path_bound = n_init * float(self.branching) ** depth
        if self.path_bound > max_paths:
            raise CapacityError(
                f"enumeration bound {n_init} * {self.branching}^{depth} = {self.path_bound:.3e} "
                f"exceeds {max_paths:.0e}"
            )
        # per-state branch tables
        br_a = [np.array([a for a, _ in br], dtype=np.intp) for br in branches]
        br_s = [np.array([s2 for _, s2 in br], dtype=np.intp) for br in branches]
        with np.errstate(divide="ignore"):
            logP = np.log(P)
            log_rho = np.log(mdp.initial_dist)
        counts = np.array([len(b) for b in br_a], dtype=np.intp)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        flat_a = np.concatenate(br_a) if br_a else np.zeros(0, np.intp)
        flat_s = np.concatenate(br_s) if br_s else np.zeros(0, np.intp)

        self.levels: list[_Level] = []
        src_state = np.flatnonzero(mdp.initial_dist > 0)
        src_index = np.full(src_state.size, -1, dtype=np.intp)
        src_logw = log_rho[src_state]
        for t in range(depth):
            rep = counts[src_state]
            idx = np.repeat(np.arange(src_state.size), rep)
            # position of each child inside its state's branch table
            within = np.arange(idx.size) - np.repeat(np.cumsum(rep) - rep, rep)
            flat = offsets[src_state][idx] + within
            st = src_state[idx]
            ac = flat_a[flat]
            nx = flat_s[flat]
            lw = logP[st, ac, nx] + src_logw[idx]
            terminal = nx == S
            last = t == depth - 1
            truncated = ~terminal & last & (depth == mdp.h_max)
            tail = ~terminal & last & ~truncated
            self.levels.append(_Level(src_index[idx], st, ac, nx, mdp.reward[st, ac], lw,
                                      terminal | truncated, truncated, tail))
            src_index = np.flatnonzero(~terminal)
            src_state = nx[src_index]
            src_logw = np.zeros(src_state.size)
        self._static = None
        self._visits = None

    @property
    def num_trajectories(self) -> int:
        return int(sum(int(lv.leaf.sum()) for lv in self.levels))

    def _static_leaf_data(self):
        # returns, horizons and truncation flags do not depend on theta
        if self._static is None:
            gamma = self.mdp.gamma
            rets, hors, truncs = [], [], []
            cum = None
            for t, lv in enumerate(self.levels):
                r = (gamma ** t) * lv.reward
                cum = r if t == 0 else cum[lv.parent] + r
                rets.append(cum[lv.leaf])
                hors.append(np.full(int(lv.leaf.sum()), t + 1, dtype=np.intp))
                truncs.append(lv.truncated[lv.leaf])
            self._static = (np.concatenate(rets), np.concatenate(hors), np.concatenate(truncs))
        return self._static

    def _visit_data(self):
        # theta enters a leaf only through its (state, action) visit counts;
        # counts are kept as float64 (n, S*A) so both uses are plain matmuls
        if self._visits is None:
            SA = self.mdp.num_states * self.mdp.num_actions
            dtype = np.uint8 if len(self.levels) < 256 else np.uint16
            leaf_c, leaf_env, tail_c, tail_env = [], [], [], []
            cnt = env = None
            for t, lv in enumerate(self.levels):
                sa = lv.state * self.mdp.num_actions + lv.action
                if t == 0:
                    cnt = np.zeros((lv.state.size, SA), dtype=dtype)
                    env = lv.log_env.copy()
                else:
                    cnt = cnt[lv.parent]
                    env = env[lv.parent] + lv.log_env
                cnt[np.arange(sa.size), sa] += 1
                leaf_c.append(cnt[lv.leaf])
                leaf_env.append(env[lv.leaf])
                if lv.tail.any():
                    tail_c.append(cnt[lv.tail])
                    tail_env.append(env[lv.tail])

            def cat(xs, shape):
                return np.concatenate(xs).astype(float) if xs else np.zeros(shape)

            self._visits = (cat(leaf_c, (0, SA)), cat(leaf_env, 0),
                            cat(tail_c, (0, SA)), cat(tail_env, 0))
        return self._visits

    def weights(self, theta, features=None) -> tuple[np.ndarray, float]:
        """Leaf probabilities under ``theta`` and the tail mass."""
        logpi = _log_policy_table(theta, self._features(features)).ravel()
        leaf_c, leaf_env, tail_c, tail_env = self._visit_data()
        probs = np.exp(leaf_env + leaf_c @ logpi)
        tail = float(np.exp(tail_env + tail_c @ logpi).sum())
        return probs, tail

    def score_sums(self, theta, features=None) -> np.ndarray:
        """sum_t grad log pi_theta(a_t|s_t) for every leaf, shape ``(n, d)``."""
        sc = score_matrix(SoftmaxLinearPolicy(theta, self._features(features)))
        leaf_c = self._visit_data()[0]
        return leaf_c @ sc.reshape(leaf_c.shape[1], -1)

    def returns(self) -> np.ndarray:
        return self._static_leaf_data()[0]

    def horizons(self) -> np.ndarray:
        return self._static_leaf_data()[1]

    def gradients(self, theta, features=None) -> np.ndarray:
        """g(tau | theta) for every leaf."""
        return self.score_sums(theta, features) * self.returns()[:, None]

    def trajectories(self) -> Iterator[Trajectory]:
        """Leaves as :class:`Trajectory` objects, in the same order as the arrays."""
        for t, lv in enumerate(self.levels):
            for i in np.flatnonzero(lv.leaf):
                states, actions, rewards, nexts = [], [], [], []
                j, depth = i, t
                while depth >= 0:
                    node = self.levels[depth]
                    states.append(int(node.state[j]))
                    actions.append(int(node.action[j]))
                    rewards.append(float(node.reward[j]))
                    nexts.append(int(node.next_state[j]))
                    j = node.parent[j]
                    depth -= 1
                yield Trajectory(np.array(states[::-1], np.intp), np.array(actions[::-1], np.intp),
                                 np.array(rewards[::-1]), bool(lv.truncated[i]),
                                 np.array(nexts[::-1], np.intp))

    def _features(self, features):
        if features is not None:
            return features
        if self.mdp.features is None:
            raise ValueError("no feature map supplied and the MDP has no default")
        return self.mdp.features


def _log_policy_table(theta, features) -> np.ndarray:
    logits = features @ np.asarray(theta, dtype=float)
    m = logits.max(axis=-1, keepdims=True)
    return logits - m - np.log(np.exp(logits - m).sum(axis=-1, keepdims=True))


@dataclass
class EnumeratedDistribution:
    """``P(tau | theta)`` over every trajectory of at most ``horizon_cap`` steps."""

    tree: TrajectoryTree
    theta: np.ndarray
    probabilities: np.ndarray
    tail_mass: float
    features: np.ndarray | None = field(default=None, repr=False)

    @property
    def horizon_cap(self) -> int:
        return self.tree.horizon_cap

    @property
    def returns(self) -> np.ndarray:
        return self.tree.returns()

    def gradients(self, theta=None) -> np.ndarray:
        return self.tree.gradients(self.theta if theta is None else theta, self.features)

    def expectation(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.probabilities, values, axes=(0, 0))

    @property
    def entries(self) -> list[tuple[Trajectory, float]]:
        return list(zip(self.tree.trajectories(), self.probabilities.tolist()))


def enumerate_trajectories(mdp: Mdp, policy: SoftmaxLinearPolicy, horizon_cap: int,
                           tree: TrajectoryTree | None = None) -> EnumeratedDistribution:
    """Enumerate every trajectory that ends within ``horizon_cap`` steps.

    Trajectories cut by ``mdp.h_max`` are included (flagged truncated), as the
    sampler produces them; paths cut only by ``horizon_cap`` make up the
    reported tail mass.  Raises :class:`CapacityError` when
    ``start_states * branching**cap`` exceeds ``MAX_ENUMERATION``.
    """
    if tree is None:
        tree = TrajectoryTree(mdp, horizon_cap)
    probs, tail = tree.weights(policy.theta, policy.features)
    return EnumeratedDistribution(tree, policy.theta, probs, tail, policy.features)


# --- linear-solve route ---------------------------------------------------

def _chain(mdp: Mdp, pi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    S = mdp.num_states
    P_pi = np.einsum("sa,sat->st", pi, mdp.transition[:, :, :S])
    r_pi = np.einsum("sa,sa->s", pi, mdp.reward)
    return P_pi, r_pi


def _check_absorbing(mdp: Mdp, P_pi: np.ndarray) -> None:
    rho = float(np.max(np.abs(np.linalg.eigvals(mdp.gamma * P_pi)))) if P_pi.size else 0.0
    if rho >= 1.0 - 1e-12:
        raise DivergenceError(
            f"spectral radius of gamma * P_pi is {rho:.15g}; the episode need not terminate"
        )


def policy_values(mdp: Mdp, pi: np.ndarray) -> np.ndarray:
    """State values V = (I - gamma P_pi)^-1 r_pi for a fixed action table."""
    P_pi, r_pi = _chain(mdp, pi)
    _check_absorbing(mdp, P_pi)
    return np.linalg.solve(np.eye(mdp.num_states) - mdp.gamma * P_pi, r_pi)


def exact_return(mdp: Mdp, policy: SoftmaxLinearPolicy, method: str = "linear",
                 horizon_cap: int | None = None) -> float:
    """J(theta) = sum_s rho0(s) V(s).

    ``method="linear"`` solves the Bellman system (infinite horizon, ``h_max``
    ignored); ``method="enumerate"`` sums ``P(tau) R(tau)`` over the tree.
    """
    if method == "linear":
        V = policy_values(mdp, policy.probability_table())
        return float(mdp.initial_dist @ V)
    if method == "enumerate":
        dist = enumerate_trajectories(mdp, policy, horizon_cap or mdp.h_max)
        return float(dist.expectation(dist.returns))
    raise ValueError(f"unknown method {method!r}")


def exact_gradient(mdp: Mdp, policy: SoftmaxLinearPolicy, horizon_cap: int | None = None,
                   method: str = "enumerate", tree: TrajectoryTree | None = None) -> np.ndarray:
    """Exact grad J(theta).

    ``"enumerate"``: sum_tau P(tau|theta) g(tau|theta).  ``"linear"``: the
    discounted-visitation form sum_s d(s) sum_a pi(a|s) Q(s, a) grad log pi(a|s),
    which needs no horizon cap and works for gamma = 1 on absorbing chains.
    """
    if method == "enumerate":
        if tree is None:
            tree = TrajectoryTree(mdp, horizon_cap or mdp.h_max)
        dist = enumerate_trajectories(mdp, policy, tree.horizon_cap, tree=tree)
        return dist.expectation(dist.gradients())
    if method == "linear":
        pi = policy.probability_table()
        P_pi, r_pi = _chain(mdp, pi)
        _check_absorbing(mdp, P_pi)
        M = np.eye(mdp.num_states) - mdp.gamma * P_pi
        V = np.linalg.solve(M, r_pi)
        visits = np.linalg.solve(M.T, mdp.initial_dist)
        Q = mdp.reward + mdp.gamma * mdp.transition[:, :, :mdp.num_states] @ V
        sc = score_matrix(policy)
        return np.einsum("s,sa,sa,sad->d", visits, pi, Q, sc)
    raise ValueError(f"unknown method {method!r}")


def tail_mass(mdp: Mdp, policy: SoftmaxLinearPolicy, horizon: int) -> float:
    """P(no termination within ``horizon`` steps), from powers of P_pi."""
    P_pi, _ = _chain(mdp, policy.probability_table())
    d = mdp.initial_dist.copy()
    for _ in range(horizon):
        d = d @ P_pi
    return float(d.sum())


def optimal_value(mdp: Mdp, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """sup over all policies of J, by value iteration (infinite horizon)."""
    S = mdp.num_states
    V = np.zeros(S)
    for _ in range(max_iter):
        Q = mdp.reward + mdp.gamma * mdp.transition[:, :, :S] @ V
        V_new = Q.max(axis=1)
        if np.max(np.abs(V_new - V)) < tol:
            V = V_new
            break
        V = V_new
    else:
        raise DivergenceError("value iteration did not converge")
    return float(mdp.initial_dist @ V)


def finite_difference(objective: Callable[[np.ndarray], float], theta, h: float = 1e-5
                      ) -> np.ndarray:
    """Central differences, one component at a time."""
    if not h > 0:
        raise ValueError("h must be positive")
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        grad[i] = (objective(theta + e) - objective(theta - e)) / (2.0 * h)
    return grad


# --- estimator moments ---------------------------------------------------

VANILLA = "vanilla"
VRMPO_RECURSIVE = "vrmpo_recursive"


def estimator_moments(kind: str, mdp: Mdp, theta_sequence: Sequence, batch_sizes: Sequence[int],
                      horizon_cap: int, features: np.ndarray | None = None,
                      tree: TrajectoryTree | None = None) -> tuple[np.ndarray, float]:
    """Exact mean and ``E||X - E X||^2`` of an estimator over a frozen theta path.

    ``vanilla``: batch mean of ``batch_sizes[0]`` draws of g(tau|theta_0).

    ``vrmpo_recursive``: ``G_t`` after the recursion along ``theta_0..theta_t``
    with an initial batch of ``batch_sizes[0]`` and ``batch_sizes[1]``
    trajectories per correction.  With the path frozen, the batch mean and
    every correction are independent, so variances add.
    """
    if tree is None:
        tree = TrajectoryTree(mdp, horizon_cap)
    feats = features if features is not None else mdp.features
    thetas = [np.asarray(t, dtype=float) for t in theta_sequence]
    if not thetas:
        raise ValueError("theta_sequence is empty")

    def moments(theta_draw, theta_a, theta_b=None):
        w, _ = tree.weights(theta_draw, feats)
        x = tree.gradients(theta_a, feats)
        if theta_b is not None:
            x = x - tree.gradients(theta_b, feats)
        mean = w @ x
        var = float(w @ np.sum((x - mean) ** 2, axis=1))
        return mean, var

    if kind == VANILLA:
        mean, var = moments(thetas[0], thetas[0])
        return mean, var / batch_sizes[0]
    if kind == VRMPO_RECURSIVE:
        n1 = batch_sizes[0]
        n2 = batch_sizes[1] if len(batch_sizes) > 1 else batch_sizes[0]
        mean, var = moments(thetas[0], thetas[0])
        var /= n1
        for prev, now in zip(thetas[:-1], thetas[1:]):
            m_i, v_i = moments(now, now, prev)
            mean = mean + m_i
            var += v_i / n2
        return mean, var
    raise ValueError(f"estimator kind {kind!r} has no exact moments")


def deviation_second_moment(mdp: Mdp, policy: SoftmaxLinearPolicy, horizon_cap: int,
                            tree: TrajectoryTree | None = None) -> tuple[float, float]:
    """``(E||g - grad J||^2, max_tau ||g - grad J||^2)`` under ``policy``."""
    if tree is None:
        tree = TrajectoryTree(mdp, horizon_cap)
    w, _ = tree.weights(policy.theta, policy.features)
    g = tree.gradients(policy.theta, policy.features)
    grad = w @ g
    dev = np.sum((g - grad) ** 2, axis=1)
    return float(w @ dev), float(dev.max())


@dataclass(frozen=True)
class DeviationDiagnostic:
    """Per-trajectory squared deviation ``||g - grad J||^2`` against two caps:
    the triangle-inequality bound (guaranteed) and ``G^2 R^2 / (1 - gamma)^4``
    with the per-component score bound ``G`` (not guaranteed, only reported)."""

    mean_sq: float
    max_sq: float
    triangle_sq: float
    sigma_sq: float | None

    @property
    def sigma_ratio(self) -> float | None:
        return None if not self.sigma_sq else self.max_sq / self.sigma_sq


def deviation_diagnostic(mdp: Mdp, policy: SoftmaxLinearPolicy, horizon_cap: int,
                         tree: TrajectoryTree | None = None) -> DeviationDiagnostic:
    if tree is None:
        tree = TrajectoryTree(mdp, horizon_cap)
    mean_sq, max_sq = deviation_second_moment(mdp, policy, horizon_cap, tree=tree)
    sc = score_matrix(policy)
    g_norm = float(np.linalg.norm(sc, axis=-1).max())
    r_bound = float(np.abs(tree.returns()).max())
    sigma_sq = deviation_bound_sq(float(np.abs(sc).max()), mdp.r_max, mdp.gamma)
    diag = DeviationDiagnostic(mean_sq, max_sq,
                               triangle_deviation_bound(tree.horizon_cap, g_norm, r_bound),
                               sigma_sq)
    logger.info("deviation: max %.6g, triangle cap %.6g, ratio to sigma^2 %s",
                max_sq, diag.triangle_sq, diag.sigma_ratio)
    return diag


def empirical_lipschitz(grad_fn: Callable[[np.ndarray], np.ndarray], pairs) -> float:
    """max ||grad(a) - grad(b)|| / ||a - b|| over the given pairs."""
    best = 0.0
    for a, b in pairs:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        gap = float(np.linalg.norm(a - b))
        if gap == 0.0:
            continue
        best = max(best, float(np.linalg.norm(grad_fn(a) - grad_fn(b))) / gap)
    return best


def random_pairs(dim: int, n: int, rng: np.random.Generator, radius: float = 2.0,
                 max_gap: float = 0.5) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairs ``(a, a + u)`` with ``a`` uniform in the box and ``||u|| <= max_gap``."""
    out = []
    for _ in range(n):
        a = rng.uniform(-radius, radius, dim)
        u = rng.normal(size=dim)
        u *= rng.uniform(0.0, max_gap) / np.linalg.norm(u)
        out.append((a, a + u))
    return out


def segment_lipschitz(grad_fn: Callable[[np.ndarray], np.ndarray], a, b, points: int = 8) -> float:
    """Largest difference quotient of ``grad_fn`` between consecutive points of [a, b]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ts = np.linspace(0.0, 1.0, points + 1)
    pts = [a + t * (b - a) for t in ts]
    return empirical_lipschitz(grad_fn, zip(pts[:-1], pts[1:]))


@dataclass
class RecursionCheck:
    lhs: float          # E||G_t - grad J(theta_t)||^2
    prev_error: float   # E||G_{t-1} - grad J(theta_{t-1})||^2
    lipschitz: float
    step_sq: float
    n2: int

    @property
    def rhs(self) -> float:
        return self.lipschitz ** 2 / self.n2 * self.step_sq + self.prev_error

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf


def variance_recursion_check(mdp: Mdp, theta_path: Sequence, n1: int, n2: int,
                             horizon_cap: int, features: np.ndarray | None = None,
                             tree: TrajectoryTree | None = None) -> RecursionCheck:
    """Exact terms of the one-step error recursion for the recursive estimator.

    ``theta_path`` is ``theta_0, ..., theta_t``; the check compares the mean
    squared error after the last correction against the error one step
    earlier plus ``L^2 / N2 ||theta_t - theta_{t-1}||^2``, with ``L`` measured
    on the segment between the last two parameters with the closed-form
    gradient.
    """
    if tree is None:
        tree = TrajectoryTree(mdp, horizon_cap)
    feats = features if features is not None else mdp.features
    path = [np.asarray(t, dtype=float) for t in theta_path]
    if len(path) < 2:
        raise ValueError("need at least two parameters")

    # each weight and gradient table over the tree is computed once
    w_cache, g_cache = {}, {}

    def w_at(i):
        if i not in w_cache:
            w_cache[i] = tree.weights(path[i], feats)[0]
        return w_cache[i]

    def g_at(i):
        if i not in g_cache:
            g_cache[i] = tree.gradients(path[i], feats)
        return g_cache[i]

    def mse(t):
        # E||G_t - grad J(theta_t)||^2: squared bias plus the summed variances
        mean = w_at(0) @ g_at(0)
        var = float(w_at(0) @ np.sum((g_at(0) - mean) ** 2, axis=1)) / n1
        for i in range(1, t + 1):
            x = g_at(i) - g_at(i - 1)
            m_i = w_at(i) @ x
            mean = mean + m_i
            var += float(w_at(i) @ np.sum((x - m_i) ** 2, axis=1)) / n2
        return float(np.sum((mean - w_at(t) @ g_at(t)) ** 2)) + var

    def exact_grad(th):
        # closed-form gradient; enumerating the tree at every segment point is slow
        return exact_gradient(mdp, SoftmaxLinearPolicy(th, feats), method="linear")

    t = len(path) - 1
    lhs = mse(t)
    prev = mse(t - 1)
    lip = segment_lipschitz(exact_grad, path[-2], path[-1])
    step_sq = float(np.sum((path[-1] - path[-2]) ** 2))
    return RecursionCheck(lhs, prev, lip, step_sq, n2)


# --- corridor -------------------------------------------------------------

def corridor_value(p: float, mdp: Mdp | None = None) -> float:
    """V(s1) when every state picks right with probability ``p``."""
    if not 0.0 < p < 1.0:
        raise DivergenceError(f"p(right)={p}: the corridor episode never terminates")
    mdp = mdp or make_short_corridor()
    pi = np.zeros((mdp.num_states, mdp.num_actions))
    pi[:, RIGHT] = p
    pi[:, LEFT] = 1.0 - p
    return float(policy_values(mdp, pi)[0])


def corridor_value_curve(p_grid: Sequence[float]) -> list[tuple[float, float]]:
    mdp = make_short_corridor()
    return [(float(p), corridor_value(p, mdp)) for p in p_grid]


def corridor_p_right(theta) -> float:
    """p(right) under the corridor features: sigmoid(theta_0 - theta_1)."""
    theta = np.asarray(theta, dtype=float)
    return 1.0 / (1.0 + math.exp(-(theta[0] - theta[1])))
