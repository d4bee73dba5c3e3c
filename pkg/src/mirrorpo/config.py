"""Experiment configuration: a fixed JSON schema with strict validation.

Top-level keys are ``env``, ``algo``, ``seeds``, ``output`` and
``oracle_logging``; anything else is an error.  ``algo`` is one object, or
a list of objects for comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from mirrorpo.algorithms import ALGORITHMS, AlgoConfig, VrmpoParams
from mirrorpo.mdp import Mdp, make_random_mdp, make_short_corridor
from mirrorpo.mirror import EUCLIDEAN, PNORM, MirrorMap

STEP_GRID = (0.01, 0.02, 0.04, 0.08, 0.1)
P_GRID = (1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 3.0, 4.0, 5.0)

TOP_KEYS = {"env", "algo", "seeds", "output", "oracle_logging"}
OUTPUT_KEYS = {"dir", "log_every"}
ENV_KEYS = {
    "short_corridor": {"name", "gamma", "h_max"},
    "random_mdp": {"name", "num_states", "num_actions", "seed", "gamma", "h_max",
                   "successors", "terminal_prob"},
}
ALGO_KEYS = {"name", "algorithm", "mirror", "step_size", "episodes", "vrmpo", "gamma",
             "theta0_range", "mirror_first_step", "step_schedule", "smoothness"}
MIRROR_KEYS = {"kind", "p", "zeta"}
VRMPO_KEYS = {"N1", "N2", "m", "K"}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every violation found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class EnvConfig:
    name: str = "short_corridor"
    params: dict = field(default_factory=dict)

    def build(self) -> Mdp:
        if self.name == "short_corridor":
            return make_short_corridor(**self.params)
        kw = dict(self.params)
        if "terminal_prob" in kw:
            kw["terminal_prob"] = tuple(kw["terminal_prob"])
        return make_random_mdp(**kw)

    def to_dict(self) -> dict:
        return {"name": self.name, **self.params}


@dataclass(frozen=True)
class NamedAlgo:
    name: str
    config: AlgoConfig


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvConfig
    algos: tuple[NamedAlgo, ...]
    seeds: tuple[int, ...]
    output_dir: str = "results"
    log_every: int = 1
    oracle_logging: bool = True
    algo_is_list: bool = False

    @property
    def algo(self) -> AlgoConfig:
        return self.algos[0].config

    def to_dict(self) -> dict:
        algos = [algo_to_dict(a) for a in self.algos]
        return {
            "env": self.env.to_dict(),
            "algo": algos if self.algo_is_list else algos[0],
            "seeds": list(self.seeds),
            "output": {"dir": self.output_dir, "log_every": self.log_every},
            "oracle_logging": self.oracle_logging,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def algo_to_dict(named: NamedAlgo) -> dict:
    c = named.config
    return {
        "name": named.name,
        "algorithm": c.algorithm,
        "mirror": c.mirror.to_dict(),
        "step_size": c.step_size,
        "episodes": c.episodes,
        "vrmpo": {"N1": c.vrmpo.N1, "N2": c.vrmpo.N2, "m": c.vrmpo.m, "K": c.vrmpo.K},
        "gamma": c.gamma,
        "theta0_range": list(c.theta0_range),
        "mirror_first_step": c.mirror_first_step,
        "step_schedule": c.step_schedule,
        "smoothness": c.smoothness,
    }


def _unknown(d: dict, allowed: set, where: str, errors: list[str]) -> None:
    for k in sorted(set(d) - allowed):
        errors.append(f"{where}: unknown key {k!r}")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _parse_env(raw, errors) -> EnvConfig | None:
    if not isinstance(raw, dict):
        errors.append("env: must be an object")
        return None
    name = raw.get("name", "short_corridor")
    if name not in ENV_KEYS:
        errors.append(f"env.name: unknown environment {name!r}")
        return None
    _unknown(raw, ENV_KEYS[name], "env", errors)
    params = {k: v for k, v in raw.items() if k != "name" and k in ENV_KEYS[name]}
    if "gamma" in params and not (_is_number(params["gamma"]) and 0 < params["gamma"] <= 1):
        errors.append("env.gamma: must be a number in (0, 1]")
    if "h_max" in params and not (_is_int(params["h_max"]) and params["h_max"] >= 1):
        errors.append("env.h_max: must be an integer >= 1")
    if name == "random_mdp":
        for k in ("num_states", "num_actions", "seed"):
            if k not in params:
                errors.append(f"env.{k}: required for random_mdp")
            elif not _is_int(params[k]):
                errors.append(f"env.{k}: must be an integer")
    return EnvConfig(name, params)


def _parse_mirror(raw, where, errors) -> MirrorMap:
    if raw is None:
        return MirrorMap.euclidean()
    if not isinstance(raw, dict):
        errors.append(f"{where}: must be an object")
        return MirrorMap.euclidean()
    _unknown(raw, MIRROR_KEYS, where, errors)
    kind = raw.get("kind", EUCLIDEAN)
    if kind not in (EUCLIDEAN, PNORM):
        errors.append(f"{where}.kind: must be {EUCLIDEAN!r} or {PNORM!r}")
        return MirrorMap.euclidean()
    try:
        if kind == EUCLIDEAN:
            return MirrorMap(EUCLIDEAN, 2.0, raw.get("zeta"))
        return MirrorMap(PNORM, raw.get("p", 2.0), raw.get("zeta"))
    except (ValueError, TypeError) as exc:
        errors.append(f"{where}: {exc}")
        return MirrorMap.euclidean()


def _parse_algo(raw, where, errors) -> NamedAlgo | None:
    if not isinstance(raw, dict):
        errors.append(f"{where}: must be an object")
        return None
    _unknown(raw, ALGO_KEYS, where, errors)
    algorithm = raw.get("algorithm", "mpo")
    if algorithm not in ALGORITHMS:
        errors.append(f"{where}.algorithm: must be one of {', '.join(ALGORITHMS)}")
        return None
    n_before = len(errors)
    mirror = _parse_mirror(raw.get("mirror"), f"{where}.mirror", errors)
    vr = raw.get("vrmpo", {})
    vrmpo = VrmpoParams()
    if not isinstance(vr, dict):
        errors.append(f"{where}.vrmpo: must be an object")
    else:
        _unknown(vr, VRMPO_KEYS, f"{where}.vrmpo", errors)
        for k, v in vr.items():
            if k in VRMPO_KEYS and not _is_int(v):
                errors.append(f"{where}.vrmpo.{k}: must be an integer")
        try:
            vrmpo = VrmpoParams(**{k: v for k, v in vr.items() if k in VRMPO_KEYS})
        except (ValueError, TypeError) as exc:
            errors.append(f"{where}.vrmpo: {exc}")
    for k in ("step_size", "smoothness", "gamma"):
        v = raw.get(k)
        if v is not None and not _is_number(v):
            errors.append(f"{where}.{k}: must be a number")
    if "episodes" in raw and not _is_int(raw["episodes"]):
        errors.append(f"{where}.episodes: must be an integer")
    rng = raw.get("theta0_range", [-0.5, 0.5])
    if not (isinstance(rng, (list, tuple)) and len(rng) == 2 and all(map(_is_number, rng))):
        errors.append(f"{where}.theta0_range: must be a pair of numbers")
        rng = [-0.5, 0.5]
    if len(errors) > n_before:
        return None
    try:
        cfg = AlgoConfig(
            algorithm=algorithm,
            mirror=mirror,
            step_size=float(raw.get("step_size", 0.1)),
            episodes=int(raw.get("episodes", 1000)),
            vrmpo=vrmpo,
            gamma=raw.get("gamma"),
            theta0_range=(float(rng[0]), float(rng[1])),
            mirror_first_step=bool(raw.get("mirror_first_step", False)),
            step_schedule=raw.get("step_schedule", "constant"),
            smoothness=raw.get("smoothness"),
        )
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None
    return NamedAlgo(str(raw.get("name", algorithm)), cfg)


def parse_config(raw: Any) -> ExperimentConfig:
    """Validate a decoded JSON document; raises :class:`ConfigError`."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level: must be an object"])
    _unknown(raw, TOP_KEYS, "top level", errors)
    for k in ("env", "algo", "seeds"):
        if k not in raw:
            errors.append(f"top level: missing key {k!r}")
    env = _parse_env(raw.get("env", {}), errors)

    algo_raw = raw.get("algo", {})
    is_list = isinstance(algo_raw, list)
    items = algo_raw if is_list else [algo_raw]
    if is_list and not items:
        errors.append("algo: list must not be empty")
    algos = []
    for i, item in enumerate(items):
        named = _parse_algo(item, f"algo[{i}]" if is_list else "algo", errors)
        if named is not None:
            algos.append(named)
    names = [a.name for a in algos]
    if len(set(names)) != len(names):
        errors.append("algo: names must be distinct")

    seeds = raw.get("seeds", [])
    if not isinstance(seeds, list) or not seeds:
        errors.append("seeds: must be a nonempty list")
        seeds = []
    elif not all(_is_int(s) for s in seeds):
        errors.append("seeds: must be integers")
    elif len(set(seeds)) != len(seeds):
        errors.append("seeds: must be distinct")

    out = raw.get("output", {})
    if not isinstance(out, dict):
        errors.append("output: must be an object")
        out = {}
    _unknown(out, OUTPUT_KEYS, "output", errors)
    out_dir = out.get("dir", "results")
    if not isinstance(out_dir, str) or not out_dir:
        errors.append("output.dir: must be a nonempty string")
    log_every = out.get("log_every", 1)
    if not _is_int(log_every) or log_every < 1:
        errors.append("output.log_every: must be an integer >= 1")

    oracle = raw.get("oracle_logging", True)
    if not isinstance(oracle, bool):
        errors.append("oracle_logging: must be true or false")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(env, tuple(algos), tuple(int(s) for s in seeds), out_dir,
                            int(log_every), oracle, is_list)


def loads(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    return parse_config(raw)


def load(path: str | Path) -> ExperimentConfig:
    return loads(Path(path).read_text(encoding="utf-8"))
