"""Seeded experiment execution and CSV output.

Output layout under the configured directory::

    seed_<s>.csv        one row per logged iteration of one seed
    aggregate.csv       mean and std over seeds per logged iteration
    grid.csv            step-size grid summary (``--grid``)
    sweep_p.csv         p-sweep summary
    compare.csv         algorithms aligned by trajectories consumed

Floats are written with 17 significant digits so every double round-trips.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from mirrorpo.algorithms import MPO, AlgoConfig, RunRecord, run
from mirrorpo.config import P_GRID, STEP_GRID, ConfigError, ExperimentConfig, NamedAlgo
from mirrorpo.mdp import Mdp
from mirrorpo.mirror import MirrorMap
from mirrorpo.oracle import corridor_value_curve, exact_gradient, exact_return, policy_values
from mirrorpo.policy import SoftmaxLinearPolicy

RUN_HEADER = ["iteration", "trajectories", "est_return", "exact_J", "bregman_grad_norm",
              "theta_norm", "truncated"]
FLOAT_FIELDS = ("est_return", "exact_J", "bregman_grad_norm", "theta_norm")


def fmt(x) -> str:
    """17-significant-digit text; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_rows(record: RunRecord) -> list[list]:
    return [[r.iteration, r.trajectories, r.est_return, r.exact_J, r.bregman_grad_norm,
             r.theta_norm, r.truncated] for r in record.rows]


def write_run_csv(record: RunRecord, path: str | Path) -> None:
    _write_csv(Path(path), RUN_HEADER, run_rows(record))


# --- aggregation ------------------------------------------------------------

AGG_HEADER = ["iteration", "trajectories"] + [
    f"{f}_{s}" for f in ("est_return", "exact_J", "bregman_grad_norm", "theta_norm", "truncated")
    for s in ("mean", "std")]


def _mean_std(values) -> tuple[float | None, float | None]:
    if any(v is None for v in values):
        return None, None
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(a.std())


def aggregate_rows(records: Sequence[RunRecord]) -> list[list]:
    """Mean and population std over seeds at each logged iteration."""
    if not records:
        return []
    n = len(records[0].rows)
    if any(len(r.rows) != n for r in records):
        raise ValueError("runs logged different numbers of rows")
    out = []
    for i in range(n):
        rows = [r.rows[i] for r in records]
        if len({(x.iteration, x.trajectories) for x in rows}) != 1:
            raise ValueError("runs are not aligned by iteration")
        line = [rows[0].iteration, rows[0].trajectories]
        for f in ("est_return", "exact_J", "bregman_grad_norm", "theta_norm", "truncated"):
            line.extend(_mean_std([getattr(x, f) for x in rows]))
        out.append(line)
    return out


# --- execution --------------------------------------------------------------

@dataclass(frozen=True)
class Job:
    mdp: Mdp
    config: AlgoConfig
    oracle_logging: bool
    log_every: int


def _execute(job: Job) -> RunRecord:
    return run(job.mdp, job.config, job.oracle_logging, job.log_every)


def run_jobs(jobs: Sequence[Job], workers: int = 1) -> list[RunRecord]:
    """Run independent jobs, in input order, optionally in worker processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [_execute(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_execute, jobs))


def _seeds(config: ExperimentConfig, seed_offset: int) -> list[int]:
    return [s + seed_offset for s in config.seeds]


@dataclass
class ExperimentResult:
    name: str
    config: AlgoConfig
    records: list[RunRecord]
    out_dir: Path | None

    @property
    def final_J(self) -> list[float]:
        return [-math.inf if r.final_exact_J is None else r.final_exact_J for r in self.records]

    @property
    def mean_final_J(self) -> float:
        return float(np.mean(self.final_J))

    @property
    def std_final_J(self) -> float:
        vals = np.asarray(self.final_J)
        return float(vals.std()) if np.all(np.isfinite(vals)) else math.nan


SUMMARY_HEADER = ["seed", "algorithm", "output_rule", "output_index", "trajectories",
                  "final_exact_J", "final_bregman_grad_norm", "zeta"]


def summary_row(seed: int, rec: RunRecord) -> list:
    return [seed, rec.algorithm, rec.output_rule, rec.output_index, rec.trajectories,
            rec.final_exact_J, rec.final_bregman_grad_norm, rec.zeta]


def run_algo(mdp: Mdp, named: NamedAlgo, config: ExperimentConfig, out_dir: Path | None,
             seed_offset: int = 0, workers: int = 1) -> ExperimentResult:
    seeds = _seeds(config, seed_offset)
    jobs = [Job(mdp, named.config.with_seed(s), config.oracle_logging, config.log_every)
            for s in seeds]
    records = run_jobs(jobs, workers)
    if out_dir is not None:
        for s, rec in zip(seeds, records):
            write_run_csv(rec, out_dir / f"seed_{s}.csv")
        _write_csv(out_dir / "aggregate.csv", AGG_HEADER, aggregate_rows(records))
        _write_csv(out_dir / "summary.csv", SUMMARY_HEADER,
                   [summary_row(s, r) for s, r in zip(seeds, records)])
    return ExperimentResult(named.name, named.config, records, out_dir)


def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None,
                   seed_offset: int = 0, workers: int = 1) -> list[ExperimentResult]:
    """Run every configured algorithm over every seed and write the CSVs.

    A single algorithm writes straight into the output directory; a list
    gets one subdirectory per algorithm name.
    """
    base = Path(out_dir if out_dir is not None else config.output_dir)
    mdp = config.env.build()
    results = []
    for named in config.algos:
        d = base / named.name if config.algo_is_list else base
        results.append(run_algo(mdp, named, config, d, seed_offset, workers))
    return results


# --- step-size grid ----------------------------------------------------------

GRID_HEADER = ["step_size", "final_exact_J_mean", "final_exact_J_std", "best"]


def _best_index(means: Sequence[float]) -> int:
    # first maximum; -inf marks runs whose final policy has no finite value
    return int(np.argmax(np.asarray(means, dtype=float)))


def grid_search(config: ExperimentConfig, named: NamedAlgo | None = None,
                out_dir: str | Path | None = None, step_grid: Sequence[float] = STEP_GRID,
                seed_offset: int = 0, workers: int = 1
                ) -> tuple[ExperimentResult, list[ExperimentResult]]:
    """Run ``named`` (default: the first algorithm) at every step size and
    return the best by mean final exact J along with all results."""
    named = named or config.algos[0]
    base = Path(out_dir if out_dir is not None else config.output_dir)
    mdp = config.env.build()
    results = []
    for a in step_grid:
        cfg = replace(named.config, step_size=float(a), step_schedule="constant")
        results.append(run_algo(mdp, NamedAlgo(named.name, cfg), config,
                                base / f"alpha_{fmt(a)}", seed_offset, workers))
    best = _best_index([r.mean_final_J for r in results])
    _write_csv(base / "grid.csv", GRID_HEADER,
               [[a, r.mean_final_J, r.std_final_J, int(i == best)]
                for i, (a, r) in enumerate(zip(step_grid, results))])
    return results[best], results


# --- p sweep -----------------------------------------------------------------

SWEEP_HEADER = ["p", "final_exact_J_mean", "final_exact_J_std", "best"]


def mirror_for_p(p: float) -> MirrorMap:
    return MirrorMap.euclidean() if float(p) == 2.0 else MirrorMap.pnorm(float(p))


def sweep_p(config: ExperimentConfig, p_values: Sequence[float] = P_GRID,
            out_dir: str | Path | None = None, seed_offset: int = 0, workers: int = 1
            ) -> list[tuple[float, float, float, bool]]:
    """MPO over all seeds for each p; returns ``(p, mean J, std J, is_best)``."""
    bad = [p for p in p_values if not (float(p) > 1.0 and math.isfinite(float(p)))]
    if bad:
        raise ConfigError([f"p-grid: values must be finite and > 1, got {bad}"])
    base = Path(out_dir if out_dir is not None else config.output_dir)
    mdp = config.env.build()
    named = config.algos[0]
    results = []
    for p in p_values:
        cfg = replace(named.config, algorithm=MPO, mirror=mirror_for_p(p))
        results.append(run_algo(mdp, NamedAlgo(named.name, cfg), config,
                                base / f"p_{fmt(float(p))}", seed_offset, workers))
    best = _best_index([r.mean_final_J for r in results])
    table = [(float(p), r.mean_final_J, r.std_final_J, i == best)
             for i, (p, r) in enumerate(zip(p_values, results))]
    _write_csv(base / "sweep_p.csv", SWEEP_HEADER, [[p, m, s, int(b)] for p, m, s, b in table])
    return table


# --- comparison --------------------------------------------------------------

def align_by_trajectories(result: ExperimentResult, budgets: Sequence[int]) -> list:
    """Mean exact J at each budget, from the last row using no more
    trajectories than the budget; None before the first row."""
    out = []
    for b in budgets:
        vals = []
        for rec in result.records:
            rows = [r for r in rec.rows if r.trajectories <= b]
            vals.append(rows[-1].exact_J if rows else None)
        out.append(_mean_std(vals)[0])
    return out


def compare(config: ExperimentConfig, out_dir: str | Path | None = None,
            seed_offset: int = 0, workers: int = 1, tune: bool = False
            ) -> tuple[list[ExperimentResult], list[list]]:
    """Run each algorithm (optionally tuned over the step-size grid) and
    tabulate mean exact J against cumulative trajectories."""
    base = Path(out_dir if out_dir is not None else config.output_dir)
    mdp = config.env.build()
    results = []
    for named in config.algos:
        if named.config.gamma is not None and named.config.gamma != mdp.gamma:
            raise ConfigError([f"algo {named.name!r}: gamma differs from the environment"])
        if tune:
            best, _ = grid_search(config, named, base / named.name, seed_offset=seed_offset,
                                  workers=workers)
            results.append(best)
        else:
            results.append(run_algo(mdp, named, config, base / named.name, seed_offset, workers))
    budgets = sorted({r.trajectories for res in results for rec in res.records
                      for r in rec.rows})
    columns = [align_by_trajectories(res, budgets) for res in results]
    rows = [[b] + [col[i] for col in columns] for i, b in enumerate(budgets)]
    _write_csv(base / "compare.csv", ["trajectories"] + [r.name for r in results], rows)
    return results, rows


# --- oracle dump -------------------------------------------------------------

def oracle_report(config: ExperimentConfig, seed_offset: int = 0,
                  p_step: float = 0.005) -> dict:
    """Exact return, gradient and state values at each seed's initial
    parameters; the corridor also gets its value curve."""
    mdp = config.env.build()
    named = config.algos[0]
    report = {"env": config.env.to_dict(), "points": []}
    for s in _seeds(config, seed_offset):
        cfg = named.config.with_seed(s)
        rng = np.random.default_rng(cfg.seed)
        theta = rng.uniform(*cfg.theta0_range, size=mdp.features.shape[2])
        pol = SoftmaxLinearPolicy(theta, mdp.features)
        report["points"].append({
            "seed": s,
            "theta": theta.tolist(),
            "exact_return": exact_return(mdp, pol),
            "exact_gradient": exact_gradient(mdp, pol, method="linear").tolist(),
            "state_values": policy_values(mdp, pol.probability_table()).tolist(),
        })
    if config.env.name == "short_corridor":
        grid = np.round(np.arange(p_step, 1.0, p_step), 12)
        report["value_curve"] = [[float(p), float(v)] for p, v in corridor_value_curve(grid)]
    return report


def write_oracle_report(report: dict, out_dir: str | Path) -> Path:
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    path = base / "oracle.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if "value_curve" in report:
        _write_csv(base / "value_curve.csv", ["p_right", "value"], report["value_curve"])
    return path
