"""Mirror-descent policy optimization on small tabular MDPs, with exact
oracles for checking every estimator and stationarity criterion."""

from mirrorpo.algorithms import (AlgoConfig, RunRecord, VrmpoParams, run, sample_output_index,
                                 vrmpo_hyperparams)
from mirrorpo.mdp import Mdp, make_random_mdp, make_short_corridor, sample_trajectory
from mirrorpo.mirror import MirrorMap, bregman_gradient, prox_step
from mirrorpo.oracle import (CapacityError, DivergenceError, enumerate_trajectories,
                             exact_gradient, exact_return)
from mirrorpo.policy import SoftmaxLinearPolicy

__version__ = "0.1.0"

__all__ = [
    "AlgoConfig", "CapacityError", "DivergenceError", "Mdp", "MirrorMap", "RunRecord",
    "SoftmaxLinearPolicy", "VrmpoParams", "bregman_gradient", "enumerate_trajectories",
    "exact_gradient", "exact_return", "make_random_mdp", "make_short_corridor", "prox_step",
    "run", "sample_output_index", "sample_trajectory", "vrmpo_hyperparams",
]
