"""Command-line entry point.

Subcommands: run (execute a named experiment), list (experiments and
presets), validate (check a scenario file), emit (re-emit a stored result
CSV as a plot script).  Exit codes: 0 success, 1 input error,
2 non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    CSV_COLUMNS,
    EXPERIMENTS,
    DEFAULT_PRESET,
    ExperimentResult,
    csv_to_rows,
    emit,
    result_to_plot_script,
    run_experiment,
)
from .presets import PRESETS
from .queueing import NonConvergenceError
from .scenario import Scenario, ScenarioError, apply_overrides, load_scenario, scenario_from_preset

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NONCONVERGENCE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="femtonet",
        description="Two-tier femtocell/macrocell network simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a named experiment")
    run_p.add_argument("experiment", help="experiment name (see `femtonet list`)")
    run_p.add_argument("--scenario", help="scenario file to load")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--out", default=".", help="output directory")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a scenario key")
    run_p.add_argument("--format", choices=("csv", "plot-script", "both"),
                       default="csv")

    sub.add_parser("list", help="list experiments and presets")

    val_p = sub.add_parser("validate", help="validate a scenario file")
    val_p.add_argument("path")

    emit_p = sub.add_parser("emit", help="re-emit a result CSV as a plot script")
    emit_p.add_argument("csv_path")
    emit_p.add_argument("--out", default=".")
    return parser


def _cmd_run(args) -> int:
    try:
        if args.scenario:
            scenario = load_scenario(args.scenario)
        else:
            scenario = scenario_from_preset(DEFAULT_PRESET.get(args.experiment, ""))
        if args.overrides:
            scenario = apply_overrides(scenario, args.overrides)
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.trials is not None:
            updates["trials"] = args.trials
        if updates:
            scenario = Scenario({**scenario.values, **updates})
        result = run_experiment(args.experiment, scenario)
    except (ScenarioError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    formats = ("csv", "plot-script") if args.format == "both" else (args.format,)
    for fmt in formats:
        for path in emit(result, fmt, args.out):
            print(path)
    return EXIT_OK


def _cmd_list() -> int:
    print("experiments:")
    for name in sorted(EXPERIMENTS):
        print(f"  {name}  (default preset: {DEFAULT_PRESET[name]})")
    print("presets:")
    for name in sorted(PRESETS):
        print(f"  {name}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.path)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"ok: scenario {scenario.name!r} "
          f"(seed {scenario.seed}, trials {scenario['trials']})")
    return EXIT_OK


def _cmd_emit(args) -> int:
    try:
        with open(args.csv_path, encoding="utf-8") as fh:
            rows = csv_to_rows(fh.read())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if not rows:
        print("error: empty result", file=sys.stderr)
        return EXIT_INPUT_ERROR
    import os

    name = os.path.splitext(os.path.basename(args.csv_path))[0]
    result = ExperimentResult(name, rows[0][0], rows[0][6], rows=rows)
    for path in emit(result, "plot-script", args.out):
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list":
        return _cmd_list()
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "emit":
        return _cmd_emit(args)
    return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
