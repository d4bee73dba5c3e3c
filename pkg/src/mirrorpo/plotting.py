"""PNG figures rendered next to the CSV files (Agg backend, no display)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from mirrorpo.harness import read_csv  # noqa: E402


def _floats(rows: Sequence[dict], key: str) -> np.ndarray:
    return np.array([float(r[key]) if r[key] not in ("", None) else np.nan for r in rows])


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_aggregate(csv_path: str | Path, png_path: str | Path | None = None) -> Path:
    """Mean exact J (or the sampled return when exact values are absent)
    with a one-std band, against cumulative trajectories."""
    csv_path = Path(csv_path)
    rows = read_csv(csv_path)
    x = _floats(rows, "trajectories")
    key = "exact_J" if rows and rows[0]["exact_J_mean"] != "" else "est_return"
    mean, std = _floats(rows, f"{key}_mean"), _floats(rows, f"{key}_std")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, mean, lw=1.2)
    ax.fill_between(x, mean - std, mean + std, alpha=0.25)
    ax.set_xlabel("trajectories")
    ax.set_ylabel(key)
    return _save(fig, Path(png_path) if png_path else csv_path.with_suffix(".png"))


def plot_compare(csv_path: str | Path, png_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    rows = read_csv(csv_path)
    x = _floats(rows, "trajectories")
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in [k for k in rows[0] if k != "trajectories"] if rows else []:
        ax.plot(x, _floats(rows, name), lw=1.2, label=name)
    ax.set_xlabel("trajectories")
    ax.set_ylabel("mean exact J")
    ax.legend()
    return _save(fig, Path(png_path) if png_path else csv_path.with_suffix(".png"))


def plot_summary(csv_path: str | Path, key: str, png_path: str | Path | None = None) -> Path:
    """Mean final exact J with std error bars per grid value (``key`` is
    ``p`` or ``step_size``); the best entry is highlighted."""
    csv_path = Path(csv_path)
    rows = read_csv(csv_path)
    labels = [r[key] for r in rows]
    mean = _floats(rows, "final_exact_J_mean")
    std = _floats(rows, "final_exact_J_std")
    finite = np.where(np.isfinite(mean), mean, np.nan)
    colors = ["tab:red" if r["best"] == "1" else "tab:blue" for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(rows)), finite, yerr=np.nan_to_num(std), color=colors)
    ax.set_xticks(range(len(rows)), labels)
    ax.set_xlabel(key)
    ax.set_ylabel("final exact J")
    return _save(fig, Path(png_path) if png_path else csv_path.with_suffix(".png"))


def plot_value_curve(csv_path: str | Path, png_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    rows = read_csv(csv_path)
    p, v = _floats(rows, "p_right"), _floats(rows, "value")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p, v, lw=1.2)
    i = int(np.nanargmax(v))
    ax.plot(p[i], v[i], "o", color="tab:red")
    ax.set_ylim(max(np.nanmin(v), -100.0), 0.0)
    ax.set_xlabel("probability of right")
    ax.set_ylabel("value of the start state")
    return _save(fig, Path(png_path) if png_path else csv_path.with_suffix(".png"))


def plot_directory(out_dir: str | Path) -> list[Path]:
    """Render a PNG for every recognized CSV under ``out_dir``."""
    made = []
    for path in sorted(Path(out_dir).rglob("*.csv")):
        if path.name == "aggregate.csv":
            made.append(plot_aggregate(path))
        elif path.name == "compare.csv":
            made.append(plot_compare(path))
        elif path.name == "sweep_p.csv":
            made.append(plot_summary(path, "p"))
        elif path.name == "grid.csv":
            made.append(plot_summary(path, "step_size"))
        elif path.name == "value_curve.csv":
            made.append(plot_value_curve(path))
    return made
