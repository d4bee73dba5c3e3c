"""Training loops: vanilla policy gradient, MPO (running-average mirror
ascent) and VRMPO (recursive variance-reduced mirror ascent), plus the
SVRPG importance-sampling baseline."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from mirrorpo import estimators as est
from mirrorpo.mdp import Mdp, discounted_return, sample_trajectory
from mirrorpo.mirror import MirrorMap, bregman_gradient_norm, prox_step
from mirrorpo.oracle import DivergenceError, exact_gradient, exact_return
from mirrorpo.policy import SoftmaxLinearPolicy

logger = logging.getLogger(__name__)

VPG = "vpg"
MPO = "mpo"
VRMPO = "vrmpo"
SVRPG = "svrpg"
ALGORITHMS = (VPG, MPO, VRMPO, SVRPG)

ZETA_MARGIN = 5.0 / 32.0


@dataclass(frozen=True)
class VrmpoParams:
    N1: int = 10
    N2: int = 5
    m: int = 5
    K: int = 20

    def __post_init__(self):
        for name in ("N1", "N2", "m", "K"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.m < 2:
            raise ValueError("m must be >= 2")

    @property
    def trajectories(self) -> int:
        return self.K * (self.N1 + (self.m - 1) * self.N2)


@dataclass(frozen=True)
class AlgoConfig:
    """Everything a single training run depends on besides the MDP.

    ``step_schedule`` is ``"constant"`` (use ``step_size``) or
    ``"zeta_over_2L"`` (use zeta / (2 L) with ``smoothness`` as L).
    ``smoothness`` enables randomized output selection for MPO; without it
    the last iterate is returned.
    """

    algorithm: str = MPO
    mirror: MirrorMap = field(default_factory=MirrorMap.euclidean)
    step_size: float = 0.1
    episodes: int = 1000
    vrmpo: VrmpoParams = field(default_factory=VrmpoParams)
    gamma: float | None = None
    seed: int = 0
    theta0_range: tuple[float, float] = (-0.5, 0.5)
    mirror_first_step: bool = False
    step_schedule: str = "constant"
    smoothness: float | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.step_schedule not in ("constant", "zeta_over_2L"):
            raise ValueError(f"unknown step schedule {self.step_schedule!r}")
        if self.step_schedule == "zeta_over_2L" and not self.smoothness:
            raise ValueError("the zeta_over_2L schedule needs a smoothness constant")
        if not self.alpha > 0:
            raise ValueError("step size must be positive")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        lo, hi = self.theta0_range
        if not lo <= hi:
            raise ValueError("theta0_range must be an ordered interval")
        if self.smoothness is not None and not self.smoothness > 0:
            raise ValueError("smoothness must be positive")

    @property
    def alpha(self) -> float:
        if self.step_schedule == "zeta_over_2L":
            return self.mirror.zeta / (2.0 * self.smoothness)
        return float(self.step_size)

    def with_seed(self, seed: int) -> "AlgoConfig":
        return replace(self, seed=int(seed))


@dataclass
class RunRow:
    iteration: int
    trajectories: int
    est_return: float
    exact_J: float | None
    bregman_grad_norm: float | None
    theta_norm: float
    truncated: int


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    rows: list[RunRow]
    theta_final: np.ndarray
    output_index: int
    output_rule: str
    trajectories: int
    final_exact_J: float | None = None
    final_bregman_grad_norm: float | None = None
    zeta: float | None = None
    notes: list[str] = field(default_factory=list)


class _Logger:
    """Collects rows; exact quantities only when ``oracle`` is set."""

    def __init__(self, mdp: Mdp, features, config: AlgoConfig, oracle: bool, every: int):
        if every < 1:
            raise ValueError("log_every must be >= 1")
        self.mdp = mdp
        self.features = features
        self.config = config
        self.oracle = oracle
        self.every = every
        self.rows: list[RunRow] = []
        self._returns: list[float] = []
        self._trunc = 0

    def add(self, iteration: int, trajectories: int, returns: Sequence[float], truncated: int,
            theta: np.ndarray, last: bool) -> None:
        self._returns.extend(returns)
        self._trunc += truncated
        if iteration % self.every and not last:
            return
        J = gnorm = None
        if self.oracle:
            J, gnorm = exact_metrics(self.mdp, self.features, theta, self.config)
        self.rows.append(RunRow(iteration, trajectories, float(np.mean(self._returns)), J, gnorm,
                                float(np.linalg.norm(theta)), self._trunc))
        self._returns = []
        self._trunc = 0


def exact_metrics(mdp: Mdp, features, theta, config: AlgoConfig
                  ) -> tuple[float | None, float | None]:
    """Exact J(theta) and the Bregman-gradient norm of the exact gradient."""
    pol = SoftmaxLinearPolicy(theta, features)
    try:
        J = exact_return(mdp, pol)
        g = exact_gradient(mdp, pol, method="linear")
    except DivergenceError:
        return None, None
    return J, bregman_gradient_norm(config.mirror, config.alpha, g, theta)


def _setup(mdp: Mdp, config: AlgoConfig):
    if config.gamma is not None and config.gamma != mdp.gamma:
        mdp = mdp.with_gamma(config.gamma)
    if mdp.features is None:
        raise ValueError("the MDP carries no feature map")
    rng = np.random.default_rng(config.seed)
    lo, hi = config.theta0_range
    theta = rng.uniform(lo, hi, size=mdp.features.shape[2])
    return mdp, mdp.features, rng, theta


def _finish(record: RunRecord, mdp: Mdp, features, config: AlgoConfig) -> RunRecord:
    record.final_exact_J, record.final_bregman_grad_norm = exact_metrics(
        mdp, features, record.theta_final, config)
    record.zeta = config.mirror.zeta
    return record


def run_vpg(mdp: Mdp, config: AlgoConfig, oracle_logging: bool = False,
            log_every: int = 1) -> RunRecord:
    """One trajectory per update, theta <- prox_step(theta, alpha, g(tau|theta)).

    With the Euclidean map this is plain REINFORCE-style ascent; with any
    other map it is the naive single-sample mirror step.
    """
    mdp, phi, rng, theta = _setup(mdp, config)
    log = _Logger(mdp, phi, config, oracle_logging, log_every)
    alpha = config.alpha
    for k in range(1, config.episodes + 1):
        pol = SoftmaxLinearPolicy(theta, phi)
        tr = sample_trajectory(mdp, pol, rng)
        g = est.vanilla_gradient(tr, pol, mdp.gamma)
        theta = prox_step(config.mirror, alpha, g, theta)
        log.add(k, k, [discounted_return(tr, mdp.gamma)], int(tr.truncated), theta,
                k == config.episodes)
    rec = RunRecord(VPG, config.seed, log.rows, theta, config.episodes, "last",
                    config.episodes)
    return _finish(rec, mdp, phi, config)


def run_mpo(mdp: Mdp, config: AlgoConfig, oracle_logging: bool = False,
            log_every: int = 1) -> RunRecord:
    """Mirror ascent on the running mean of all episode gradients so far.

    The returned parameters are drawn with :func:`sample_output_index` when a
    smoothness constant is configured; otherwise the last iterate is used
    and ``output_rule`` says so.
    """
    mdp, phi, rng, theta = _setup(mdp, config)
    log = _Logger(mdp, phi, config, oracle_logging, log_every)
    alpha = config.alpha
    state = est.mpo_init(theta.size)
    history = []
    for k in range(1, config.episodes + 1):
        history.append(theta)
        pol = SoftmaxLinearPolicy(theta, phi)
        tr = sample_trajectory(mdp, pol, rng)
        state = est.mpo_absorb(state, est.vanilla_gradient(tr, pol, mdp.gamma))
        theta = prox_step(config.mirror, alpha, state.value, theta)
        log.add(k, k, [discounted_return(tr, mdp.gamma)], int(tr.truncated), theta,
                k == config.episodes)
    notes = []
    if config.smoothness is None:
        idx, rule, out = config.episodes, "last", theta
        notes.append("output_rule=last: no smoothness constant, randomized output not defined")
    else:
        idx = sample_output_index([alpha] * config.episodes, config.mirror.zeta,
                                  config.smoothness, rng)
        rule, out = "random", history[idx]
    rec = RunRecord(MPO, config.seed, log.rows, out, idx, rule, config.episodes, notes=notes)
    return _finish(rec, mdp, phi, config)


def run_vrmpo(mdp: Mdp, config: AlgoConfig, oracle_logging: bool = False,
              log_every: int = 1) -> RunRecord:
    """K epochs of: batch estimate, one plain step, m-1 recursive mirror steps,
    then restart from an iterate picked uniformly from the epoch."""
    return _run_epochs(mdp, config, oracle_logging, log_every, recursive=True)


def run_svrpg(mdp: Mdp, config: AlgoConfig, oracle_logging: bool = False,
              log_every: int = 1) -> RunRecord:
    """Same epoch structure as VRMPO with the importance-weighted estimator."""
    return _run_epochs(mdp, config, oracle_logging, log_every, recursive=False)


def _run_epochs(mdp, config, oracle_logging, log_every, recursive):
    mdp, phi, rng, theta_tilde = _setup(mdp, config)
    log = _Logger(mdp, phi, config, oracle_logging, log_every)
    p = config.vrmpo
    alpha = config.alpha
    gamma = mdp.gamma
    used = 0
    it = 0
    picks = []
    last_it = p.K * p.m
    for _ in range(p.K):
        theta = theta_tilde
        pol = SoftmaxLinearPolicy(theta, phi)
        batch = [sample_trajectory(mdp, pol, rng) for _ in range(p.N1)]
        used += p.N1
        state = (est.vrmpo_init if recursive else est.svrpg_init)(batch, pol, gamma)
        if config.mirror_first_step:
            theta = prox_step(config.mirror, alpha, state.value, theta)
        else:
            # G = -state.value is the descent estimate; theta_1 = theta_0 - alpha G
            theta = theta + alpha * state.value
        iterates = [pol.theta, theta]
        it += 1
        log.add(it, used, [discounted_return(t, gamma) for t in batch],
                sum(t.truncated for t in batch), theta, it == last_it)
        for t in range(1, p.m):
            if not np.array_equal(state.prev_theta, iterates[t - 1]):
                raise RuntimeError("estimator state out of step with the inner iterates")
            pol = SoftmaxLinearPolicy(theta, phi)
            batch = [sample_trajectory(mdp, pol, rng) for _ in range(p.N2)]
            used += p.N2
            if recursive:
                state = est.vrmpo_recursive_update(state, batch, pol, gamma)
            else:
                state = est.svrpg_is_update(state, batch, pol, gamma)
            # argmin <G, w> + D(w, theta)/alpha with G = -state.value
            theta = prox_step(config.mirror, alpha, state.value, theta)
            iterates.append(theta)
            it += 1
            log.add(it, used, [discounted_return(t, gamma) for t in batch],
                    sum(t.truncated for t in batch), theta, it == last_it)
        # iterates holds theta_{k,0} .. theta_{k,m}
        pick = int(rng.integers(0, p.m + 1))
        picks.append(pick)
        theta_tilde = iterates[pick]
    name = VRMPO if recursive else SVRPG
    rec = RunRecord(name, config.seed, log.rows, theta_tilde, picks[-1], "uniform_inner", used,
                    notes=[f"epoch picks: {picks}"])
    return _finish(rec, mdp, phi, config)


RUNNERS = {VPG: run_vpg, MPO: run_mpo, VRMPO: run_vrmpo, SVRPG: run_svrpg}


def run(mdp: Mdp, config: AlgoConfig, oracle_logging: bool = False,
        log_every: int = 1) -> RunRecord:
    return RUNNERS[config.algorithm](mdp, config, oracle_logging, log_every)


def output_weights(step_sizes: Sequence[float], zeta: float, L: float) -> np.ndarray:
    """Unnormalized weights zeta a_n - L a_n^2; every a_n must be below zeta / L."""
    a = np.asarray(step_sizes, dtype=float)
    if a.size == 0:
        raise ValueError("no step sizes")
    bad = np.flatnonzero(~((a > 0) & (a < zeta / L)))
    if bad.size:
        k = int(bad[0])
        raise ValueError(f"step size a[{k}]={a[k]} outside (0, zeta/L={zeta / L})")
    return zeta * a - L * a ** 2


def sample_output_index(step_sizes: Sequence[float], zeta: float, L: float,
                        rng: np.random.Generator) -> int:
    """0-based index n drawn with probability proportional to zeta a_n - L a_n^2."""
    w = output_weights(step_sizes, zeta, L)
    return int(rng.choice(w.size, p=w / w.sum()))


@dataclass(frozen=True)
class VrmpoSchedule:
    N1: int
    N2: int
    m: int
    K: int
    alpha: float
    C: float
    N1_raw: float
    N2_raw: float
    K_raw: float

    @property
    def params(self) -> VrmpoParams:
        return VrmpoParams(self.N1, self.N2, self.m, self.K)

    @property
    def trajectories(self) -> int:
        return self.K * (self.N1 + (self.m - 1) * self.N2)


def vrmpo_hyperparams(epsilon: float, sigma: float, L: float, zeta: float,
                      delta: float) -> VrmpoSchedule:
    """Batch sizes, epoch length, epoch count and step size that target an
    epsilon-stationary output.

    ``delta`` is the expected objective gap of the starting point.  Raw
    (pre-ceiling) values are kept on the result.
    """
    if not zeta > ZETA_MARGIN:
        raise ValueError(f"zeta must exceed 5/32 for these prescriptions, got {zeta}")
    for name, v in (("epsilon", epsilon), ("sigma", sigma), ("L", L), ("delta", delta)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    C = 1.0 / (8.0 * L * zeta ** 2) + (1.0 + 1.0 / (32.0 * zeta ** 2)) / (2.0 * (zeta - ZETA_MARGIN))
    n1 = C * sigma ** 2 / epsilon ** 2
    n2 = math.sqrt(C) * sigma / epsilon
    N1 = math.ceil(n1)
    N2 = math.ceil(n2)
    m = N2 + 1
    k_raw = (8.0 * L * delta / ((m - 1) * (zeta - ZETA_MARGIN))
             * (1.0 + 1.0 / (16.0 * zeta ** 2)) / epsilon ** 2)
    return VrmpoSchedule(N1, N2, m, max(1, math.ceil(k_raw)), 1.0 / (4.0 * L), C, n1, n2, k_raw)
