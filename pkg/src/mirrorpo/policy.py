"""Soft-max policies over linear features and their regularity constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SoftmaxLinearPolicy:
    """pi(a|s) proportional to exp(phi(s, a) . theta).

    ``features`` has shape ``(num_states, num_actions, d)``.
    """

    theta: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float, copy=True)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        if self.features.ndim != 3 or self.features.shape[2] != theta.shape[0]:
            raise ValueError(
                f"feature map {self.features.shape} incompatible with theta of size {theta.size}"
            )
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta has non-finite components")

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    def with_theta(self, theta) -> "SoftmaxLinearPolicy":
        return SoftmaxLinearPolicy(theta, self.features)

    def probability_table(self) -> np.ndarray:
        """Action probabilities for every state, shape ``(S, A)``."""
        return _softmax(self.features @ self.theta)

    def action_probabilities(self, state: int) -> np.ndarray:
        return action_probabilities(self, state)

    def score(self, state: int, action: int) -> np.ndarray:
        return score(self, state, action)

    def log_prob(self, state: int, action: int) -> float:
        logits = self.features[state] @ self.theta
        m = logits.max()
        return float(logits[action] - m - math.log(np.exp(logits - m).sum()))


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def action_probabilities(policy: SoftmaxLinearPolicy, state: int) -> np.ndarray:
    return _softmax(policy.features[state] @ policy.theta)


def score(policy: SoftmaxLinearPolicy, state: int, action: int) -> np.ndarray:
    """grad_theta log pi(a|s) = phi(s, a) - E_{a'~pi}[phi(s, a')]."""
    phi = policy.features[state]
    return phi[action] - action_probabilities(policy, state) @ phi


def score_matrix(policy: SoftmaxLinearPolicy) -> np.ndarray:
    """Scores for every (s, a), shape ``(S, A, d)``."""
    pi = policy.probability_table()
    mean_phi = np.einsum("sa,sad->sd", pi, policy.features)
    return policy.features - mean_phi[:, None, :]


def log_prob_hessian(policy: SoftmaxLinearPolicy, state: int) -> np.ndarray:
    """Hessian of log pi(a|s) in theta; the same for every action.

    Equals minus the covariance of phi(s, .) under pi(.|s).
    """
    phi = policy.features[state]
    p = action_probabilities(policy, state)
    mean = p @ phi
    centered = phi - mean
    return -(centered.T * p) @ centered


def sample_theta0(dim: int, rng: np.random.Generator, low: float = -0.5,
                  high: float = 0.5) -> np.ndarray:
    return rng.uniform(low, high, size=dim)


# --- Assumption-style constants --------------------------------------------

@dataclass(frozen=True)
class AssumptionConstants:
    """Measured regularity constants; diagnostics, not guarantees.

    ``L`` and ``sigma`` are ``None`` when the discount is 1 (the closed forms
    divide by 1 - gamma).
    """

    G: float
    F: float
    G_analytic: float
    F_analytic: float
    G_norm: float
    L: float | None
    sigma: float | None
    horizon: int
    r_max: float
    gamma: float
    note: str = ""


def smoothness_constant(r_max: float, horizon: int, G: float, F: float,
                        gamma: float) -> float | None:
    """L = R H (H G^2 + F) / (1 - gamma); ``None`` for gamma = 1."""
    if gamma >= 1.0:
        return None
    return r_max * horizon * (horizon * G ** 2 + F) / (1.0 - gamma)


def deviation_bound_sq(G: float, r_max: float, gamma: float) -> float | None:
    """sigma^2 = G^2 R^2 / (1 - gamma)^4; ``None`` for gamma = 1."""
    if gamma >= 1.0:
        return None
    return G ** 2 * r_max ** 2 / (1.0 - gamma) ** 4


def theta_grid(dim: int, n_random: int = 200, radius: float = 5.0,
               seed: int = 0) -> np.ndarray:
    """Probe points for the constants: the origin, the scaled coordinate axes
    and ``n_random`` uniform draws from [-radius, radius]^dim."""
    rng = np.random.default_rng(seed)
    axes = np.vstack([radius * np.eye(dim), -radius * np.eye(dim)])
    return np.vstack([np.zeros(dim), axes, rng.uniform(-radius, radius, (n_random, dim))])


def assumption_constants(policy: SoftmaxLinearPolicy, mdp, grid: np.ndarray | None = None
                         ) -> AssumptionConstants:
    """Measure G, F over a theta grid and plug them into the L and sigma formulas.

    The grid always includes ``policy.theta``.  G and F are the larger of the
    grid maxima and are reported next to the analytic soft-max bounds
    ``2 max|phi|`` and ``max|phi|^2`` (the latter bounds a covariance entry).
    """
    phi = policy.features
    if grid is None:
        grid = theta_grid(policy.dim)
    grid = np.vstack([policy.theta[None, :], grid])
    G = F = G_norm = 0.0
    for th in grid:
        pol = policy.with_theta(th)
        sc = score_matrix(pol)
        G = max(G, float(np.max(np.abs(sc))))
        G_norm = max(G_norm, float(np.max(np.linalg.norm(sc, axis=-1))))
        for s in range(phi.shape[0]):
            F = max(F, float(np.max(np.abs(log_prob_hessian(pol, s)))))
    phi_max = float(np.max(np.abs(phi)))
    L = smoothness_constant(mdp.r_max, mdp.h_max, G, F, mdp.gamma)
    s2 = deviation_bound_sq(G, mdp.r_max, mdp.gamma)
    note = "diagnostic estimates on a finite theta grid"
    if L is None:
        note += "; L and sigma undefined (gamma=1)"
    return AssumptionConstants(G=G, F=F, G_analytic=2.0 * phi_max, F_analytic=phi_max ** 2,
                               G_norm=G_norm, L=L, sigma=None if s2 is None else math.sqrt(s2),
                               horizon=mdp.h_max, r_max=mdp.r_max, gamma=mdp.gamma, note=note)
