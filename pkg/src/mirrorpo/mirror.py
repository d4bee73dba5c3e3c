"""Mirror maps built on psi(x) = 1/2 ||x||_p^2, Bregman divergences and
the closed-form mirror (proximal) step.

All updates here are in *ascent* form: ``prox_step(map, alpha, g, theta)``
solves ``argmin_w { <-g, w> + D_psi(w, theta) / alpha }``, i.e. it moves
``theta`` along the gradient estimate ``g`` of the objective being maximized.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

EUCLIDEAN = "euclidean"
PNORM = "pnorm"


@dataclass(frozen=True)
class MirrorMap:
    kind: str = EUCLIDEAN
    p: float = 2.0
    zeta: float | None = None

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, PNORM):
            raise ValueError(f"unknown mirror map kind {self.kind!r}")
        p = 2.0 if self.kind == EUCLIDEAN else float(self.p)
        if not p > 1.0 or not math.isfinite(p):
            raise ValueError(f"p must be a finite number > 1, got {self.p}")
        object.__setattr__(self, "p", p)
        if self.zeta is None:
            object.__setattr__(self, "zeta", default_zeta(p))
        if not self.zeta > 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")

    @classmethod
    def euclidean(cls) -> "MirrorMap":
        return cls(EUCLIDEAN)

    @classmethod
    def pnorm(cls, p: float, zeta: float | None = None) -> "MirrorMap":
        return cls(PNORM, p, zeta)

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def is_identity(self) -> bool:
        return self.p == 2.0

    def psi(self, x) -> float:
        return psi(self, x)

    def grad_psi(self, x) -> np.ndarray:
        return grad_psi(self, x)

    def grad_psi_star(self, y) -> np.ndarray:
        return grad_psi_star(self, y)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "zeta": self.zeta}


def default_zeta(p: float) -> float:
    """1 for p = 2, p - 1 for p in (1, 2); for p > 2 there is no ell_2
    strong-convexity constant, so 1 is used and a warning is logged."""
    if p == 2.0:
        return 1.0
    if p < 2.0:
        return p - 1.0
    logger.warning("p=%g > 2: psi is not strongly convex in ell_2; using zeta=1", p)
    return 1.0


def _link(x: np.ndarray, r: float) -> np.ndarray:
    # sign(x) |x|^(r-1) / ||x||_r^(r-2), with 0 -> 0
    x = np.asarray(x, dtype=float)
    if r == 2.0:
        return x.copy()
    ax = np.abs(x)
    scale = ax.max(initial=0.0)
    if scale == 0.0:
        return np.zeros_like(x)
    # normalize by the max entry so |x|^r cannot overflow or underflow
    u = ax / scale
    norm_u = np.sum(u ** r) ** (1.0 / r)
    return np.sign(x) * scale * u ** (r - 1.0) / norm_u ** (r - 2.0)


def psi(m: MirrorMap, x) -> float:
    """1/2 ||x||_p^2."""
    x = np.asarray(x, dtype=float)
    if m.is_identity:
        return 0.5 * float(x @ x)
    return 0.5 * float(np.linalg.norm(x, ord=m.p)) ** 2


def psi_star(m: MirrorMap, y) -> float:
    """Convex conjugate of :func:`psi`: 1/2 ||y||_q^2."""
    y = np.asarray(y, dtype=float)
    if m.is_identity:
        return 0.5 * float(y @ y)
    return 0.5 * float(np.linalg.norm(y, ord=m.q)) ** 2


def grad_psi(m: MirrorMap, x) -> np.ndarray:
    return _link(x, m.p)


def grad_psi_star(m: MirrorMap, y) -> np.ndarray:
    return _link(y, m.q)


def bregman_divergence(m: MirrorMap, x, y) -> float:
    """D_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if m.is_identity:
        d = x - y
        return 0.5 * float(d @ d)
    return psi(m, x) - psi(m, y) - float(grad_psi(m, y) @ (x - y))


def prox_step(m: MirrorMap, alpha: float, g, theta) -> np.ndarray:
    """argmin_w { <-g, w> + D_psi(w, theta) / alpha }.

    Closed form ``grad psi*(grad psi(theta) + alpha g)``; for the Euclidean
    map this is ``theta + alpha g``.
    """
    if not alpha > 0:
        raise ValueError(f"step size must be positive, got {alpha}")
    g = np.asarray(g, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if g.shape != theta.shape:
        raise ValueError(f"gradient shape {g.shape} != parameter shape {theta.shape}")
    if m.is_identity:
        return theta + alpha * g
    return grad_psi_star(m, grad_psi(m, theta) + alpha * g)


def prox_objective(m: MirrorMap, alpha: float, g, theta, w) -> float:
    """The function :func:`prox_step` minimizes, evaluated at ``w``."""
    return -float(np.dot(g, w)) + bregman_divergence(m, w, theta) / alpha


def bregman_gradient(m: MirrorMap, alpha: float, g, theta) -> np.ndarray:
    """Gradient mapping ``(prox_step(...) - theta) / alpha`` for the linear
    model with slope ``g``.

    Oriented along the ascent direction, so it equals ``g`` exactly for the
    Euclidean map; its norm is the stationarity measure.
    """
    g = np.asarray(g, dtype=float)
    if m.is_identity:
        if not alpha > 0:
            raise ValueError(f"step size must be positive, got {alpha}")
        return g.copy()
    theta = np.asarray(theta, dtype=float)
    return (prox_step(m, alpha, g, theta) - theta) / alpha


def bregman_gradient_norm(m: MirrorMap, alpha: float, g, theta) -> float:
    return float(np.linalg.norm(bregman_gradient(m, alpha, g, theta)))


def is_stationary(m: MirrorMap, alpha: float, g, theta, epsilon: float) -> bool:
    """epsilon-approximate first-order stationarity: ||G|| <= epsilon."""
    return bregman_gradient_norm(m, alpha, g, theta) <= epsilon
