"""Command line entry point.

Exit codes: 0 success, 1 invalid configuration, 2 capacity or oracle
guard, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from mirrorpo import config as cfgmod
from mirrorpo import harness
from mirrorpo.oracle import CapacityError, DivergenceError

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_IO = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirrorpo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", help="experiment JSON file")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--seed-offset", type=int, default=0, help="added to every seed")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for seeds")
        p.add_argument("--plot", action="store_true", help="also write PNG figures")

    p_run = sub.add_parser("run", help="train over all seeds and write CSVs")
    common(p_run)
    p_run.add_argument("--grid", action="store_true",
                       help="try every step size in the preset grid and report the best")

    p_sweep = sub.add_parser("sweep-p", help="MPO over a grid of p-norm mirror maps")
    common(p_sweep)
    p_sweep.add_argument("--p-grid", type=float, nargs="+", default=list(cfgmod.P_GRID))

    p_cmp = sub.add_parser("compare", help="algorithms aligned by trajectories consumed")
    common(p_cmp)
    p_cmp.add_argument("--grid", action="store_true", help="tune each algorithm's step size")

    p_or = sub.add_parser("oracle", help="exact return, gradient and value curve")
    common(p_or)
    return parser


def _cmd_run(args, config, out: Path) -> None:
    if args.grid:
        best, results = harness.grid_search(config, out_dir=out, seed_offset=args.seed_offset,
                                            workers=args.jobs)
        for r in results:
            print(f"step_size={r.config.step_size:g} mean_final_J={r.mean_final_J:.6g}")
        print(f"best step_size={best.config.step_size:g}")
        return
    for res in harness.run_experiment(config, out, args.seed_offset, args.jobs):
        print(f"{res.name}: mean_final_J={res.mean_final_J:.6g} std={res.std_final_J:.6g}")


def _cmd_sweep(args, config, out: Path) -> None:
    table = harness.sweep_p(config, args.p_grid, out, args.seed_offset, args.jobs)
    for p, m, s, best in table:
        print(f"p={p:g} mean_final_J={m:.6g} std={s:.6g}{'  best' if best else ''}")


def _cmd_compare(args, config, out: Path) -> None:
    results, _ = harness.compare(config, out, args.seed_offset, args.jobs, tune=args.grid)
    for r in results:
        print(f"{r.name}: step_size={r.config.step_size:g} mean_final_J={r.mean_final_J:.6g}")


def _cmd_oracle(args, config, out: Path) -> None:
    report = harness.oracle_report(config, args.seed_offset)
    path = harness.write_oracle_report(report, out)
    json.dump(report["points"], sys.stdout, indent=2)
    print(f"\nwrote {path}")


COMMANDS = {"run": _cmd_run, "sweep-p": _cmd_sweep, "compare": _cmd_compare,
            "oracle": _cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = cfgmod.load(args.config)
        out = Path(args.out or config.output_dir)
        COMMANDS[args.command](args, config, out)
        if args.plot:
            from mirrorpo.plotting import plot_directory

            for path in plot_directory(out):
                print(f"wrote {path}")
    except cfgmod.ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CapacityError, DivergenceError) as exc:
        print(f"oracle guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
