"""Finite tabular MDPs, trajectory sampling and the short-corridor benchmark.

States are indexed ``0 .. num_states - 1``; index ``num_states`` is the
absorbing terminal state.  The terminal index only appears as a column of
the transition tensor, never in rewards, initial distributions or feature
maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from mirrorpo.policy import SoftmaxLinearPolicy

LEFT = 0
RIGHT = 1

_ROW_TOL = 1e-12


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mdp:
    """Immutable finite MDP.

    ``transition[s, a, s']`` ranges over ``s' in 0..num_states`` where the last
    column is the terminal state.  ``features`` is the default feature map
    ``phi[s, a, :]`` used when building policies for this MDP.
    """

    transition: np.ndarray
    reward: np.ndarray
    initial_dist: np.ndarray
    gamma: float = 1.0
    h_max: int = 1000
    r_max: float | None = None
    features: np.ndarray | None = None
    name: str = "mdp"

    def __post_init__(self):
        P = _frozen(self.transition)
        R = _frozen(self.reward)
        rho = _frozen(self.initial_dist)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "reward", R)
        object.__setattr__(self, "initial_dist", rho)
        if self.features is not None:
            object.__setattr__(self, "features", _frozen(self.features))
        if self.r_max is None:
            object.__setattr__(self, "r_max", float(np.max(np.abs(R))) if R.size else 0.0)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "h_max", int(self.h_max))
        self.validate()

    @property
    def num_states(self) -> int:
        return self.reward.shape[0]

    @property
    def num_actions(self) -> int:
        return self.reward.shape[1]

    @property
    def terminal(self) -> int:
        return self.num_states

    def validate(self) -> None:
        S, A = self.reward.shape
        if self.transition.shape != (S, A, S + 1):
            raise ValueError(
                f"transition shape {self.transition.shape} != {(S, A, S + 1)}"
            )
        if self.initial_dist.shape != (S,):
            raise ValueError(f"initial_dist shape {self.initial_dist.shape} != {(S,)}")
        if np.any(self.transition < 0):
            raise ValueError("negative transition probability")
        row_err = np.max(np.abs(self.transition.sum(axis=2) - 1.0))
        if row_err > _ROW_TOL:
            raise ValueError(f"transition rows do not sum to 1 (max error {row_err:.3e})")
        if np.any(self.initial_dist < 0) or abs(self.initial_dist.sum() - 1.0) > _ROW_TOL:
            raise ValueError("initial_dist is not a probability vector")
        if np.max(np.abs(self.reward), initial=0.0) > self.r_max:
            raise ValueError(f"|reward| exceeds declared r_max={self.r_max}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.h_max < 1:
            raise ValueError("h_max must be >= 1")
        if self.features is not None and self.features.shape[:2] != (S, A):
            raise ValueError(
                f"features shape {self.features.shape} does not start with {(S, A)}"
            )

    def with_gamma(self, gamma: float) -> "Mdp":
        return Mdp(self.transition, self.reward, self.initial_dist, gamma, self.h_max,
                   self.r_max, self.features, self.name)

    def with_h_max(self, h_max: int) -> "Mdp":
        return Mdp(self.transition, self.reward, self.initial_dist, self.gamma, h_max,
                   self.r_max, self.features, self.name)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One episode as parallel arrays; ``rewards[t]`` is r_{t+1}."""

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    truncated: bool = False
    next_states: np.ndarray | None = field(default=None, repr=False)

    @property
    def horizon(self) -> int:
        return len(self.states)

    @property
    def steps(self) -> list[tuple[int, int, float]]:
        return [(int(s), int(a), float(r))
                for s, a, r in zip(self.states, self.actions, self.rewards)]

    def discounted_return(self, gamma: float) -> float:
        return discounted_return(self, gamma)


def step(mdp: Mdp, state: int, action: int, rng: np.random.Generator) -> tuple[int, float, bool]:
    """Advance one step.  Returns ``(next_state, reward, done)``."""
    if not 0 <= state < mdp.num_states:
        raise IndexError(f"state {state} out of range for {mdp.num_states} nonterminal states")
    if not 0 <= action < mdp.num_actions:
        raise IndexError(f"action {action} out of range for {mdp.num_actions} actions")
    nxt = _draw(mdp.transition[state, action], rng.random())
    return nxt, float(mdp.reward[state, action]), nxt == mdp.terminal


def _draw(probs, u: float) -> int:
    # inverse-CDF draw; falls back to the last index with positive mass on rounding
    acc = 0.0
    last = 0
    for i, p in enumerate(probs):
        if p <= 0.0:
            continue
        acc += p
        last = i
        if u < acc:
            return i
    return last


def _cdf_rows(table) -> list:
    # per-row cumulative sums as python lists, zero-mass entries skipped
    rows = []
    for probs in np.asarray(table, dtype=float).reshape(-1, np.shape(table)[-1]):
        idx = [i for i, p in enumerate(probs) if p > 0.0]
        rows.append((np.cumsum(probs[idx]).tolist(), idx))
    return rows


def _draw_cdf(row, u: float) -> int:
    cum, idx = row
    for c, i in zip(cum, idx):
        if u < c:
            return i
    return idx[-1]


def sample_trajectory(mdp: Mdp, policy: "SoftmaxLinearPolicy",
                      rng: np.random.Generator) -> Trajectory:
    """Roll out one episode under ``policy``.

    The episode ends at the terminal state or after ``mdp.h_max`` steps, in
    which case ``truncated`` is set.  Uniforms are drawn from ``rng`` in
    blocks of doubling size; the first one picks the start state, then each
    step uses one for the action and one for the transition, in the same
    order as :func:`step`.  Unused uniforms of the last block are discarded.
    """
    if policy.features.shape[:2] != (mdp.num_states, mdp.num_actions):
        raise ValueError("policy feature map does not match the MDP")
    A = mdp.num_actions
    pi_rows = _cdf_rows(policy.probability_table())
    tr_rows = _cdf_rows(mdp.transition)
    rew = mdp.reward.ravel().tolist()
    terminal = mdp.terminal
    block = 32
    buf = rng.random(block).tolist()
    pos = 1
    s = _draw_cdf(_cdf_rows(mdp.initial_dist[None, :])[0], buf[0])
    states, actions, nexts = [], [], []
    truncated = True
    for _ in range(mdp.h_max):
        if pos + 2 > len(buf):
            block *= 2
            buf = rng.random(block).tolist()
            pos = 0
        a = _draw_cdf(pi_rows[s], buf[pos])
        nxt = _draw_cdf(tr_rows[s * A + a], buf[pos + 1])
        pos += 2
        states.append(s)
        actions.append(a)
        nexts.append(nxt)
        if nxt == terminal:
            truncated = False
            break
        s = nxt
    st = np.array(states, dtype=np.intp)
    ac = np.array(actions, dtype=np.intp)
    rewards = np.array([rew[i * A + j] for i, j in zip(states, actions)], dtype=float)
    return Trajectory(st, ac, rewards, truncated, np.array(nexts, dtype=np.intp))


def discounted_return(traj: Trajectory, gamma: float) -> float:
    """sum_t gamma^t r_{t+1}."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    r = np.asarray(traj.rewards, dtype=float)
    if r.size == 0:
        return 0.0
    if gamma == 1.0:
        return float(np.sum(r))
    return float(np.dot(gamma ** np.arange(r.size), r))


def corridor_features() -> np.ndarray:
    """phi(s, right) = [1, 0] and phi(s, left) = [0, 1] at every state."""
    phi = np.zeros((3, 2, 2))
    phi[:, RIGHT] = [1.0, 0.0]
    phi[:, LEFT] = [0.0, 1.0]
    return phi


def tabular_features(num_states: int, num_actions: int) -> np.ndarray:
    """One-hot features of dimension ``num_states * num_actions``."""
    d = num_states * num_actions
    return np.eye(d).reshape(num_states, num_actions, d)


def make_short_corridor(gamma: float = 1.0, h_max: int = 1000) -> Mdp:
    """Three-state corridor where the middle state swaps left and right.

    s1: left stays, right -> s2; s2: left -> s3, right -> s1;
    s3: left -> s2, right -> terminal.  Reward -1 every step, start in s1.
    """
    S, A = 3, 2
    T = S
    P = np.zeros((S, A, S + 1))
    P[0, LEFT, 0] = 1.0
    P[0, RIGHT, 1] = 1.0
    P[1, LEFT, 2] = 1.0
    P[1, RIGHT, 0] = 1.0
    P[2, LEFT, 1] = 1.0
    P[2, RIGHT, T] = 1.0
    R = -np.ones((S, A))
    rho = np.array([1.0, 0.0, 0.0])
    return Mdp(P, R, rho, gamma=gamma, h_max=h_max, r_max=1.0,
               features=corridor_features(), name="short_corridor")


def make_random_mdp(num_states: int, num_actions: int, seed: int, gamma: float = 0.95,
                    h_max: int = 200, successors: int | None = None,
                    terminal_prob: tuple[float, float] = (0.5, 0.9)) -> Mdp:
    """Seeded random MDP with an absorbing terminal reachable from every (s, a).

    Each (s, a) terminates with probability drawn uniformly from
    ``terminal_prob``; the remaining mass is spread over ``successors``
    randomly chosen nonterminal states with Dirichlet(1) weights.  Small
    ``successors`` keeps exhaustive trajectory enumeration tractable.
    Rewards are uniform on [-1, 1]; features are tabular.
    """
    if num_states < 1 or num_actions < 1:
        raise ValueError("need at least one state and one action")
    lo, hi = terminal_prob
    if not 0.1 <= lo <= hi <= 1.0:
        raise ValueError("terminal probability range must lie in [0.1, 1]")
    k = num_states if successors is None else int(successors)
    if not 1 <= k <= num_states:
        raise ValueError(f"successors must lie in [1, {num_states}]")
    rng = np.random.default_rng(seed)
    S, A = num_states, num_actions
    P = np.zeros((S, A, S + 1))
    for s in range(S):
        for a in range(A):
            q = rng.uniform(lo, hi)
            targets = rng.choice(S, size=k, replace=False)
            w = rng.dirichlet(np.ones(k))
            P[s, a, targets] = (1.0 - q) * w
            P[s, a, S] = q
            # absorb rounding into the terminal entry so rows sum to 1 exactly
            P[s, a, S] = 1.0 - P[s, a, :S].sum()
    R = rng.uniform(-1.0, 1.0, size=(S, A))
    rho = rng.dirichlet(np.ones(S))
    rho[-1] = 1.0 - rho[:-1].sum()
    return Mdp(P, R, rho, gamma=gamma, h_max=h_max, r_max=1.0,
               features=tabular_features(S, A), name=f"random_mdp_{S}x{A}_seed{seed}")
