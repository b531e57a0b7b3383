"""Command-line front end.

Exit status: 0 when every task passes, 1 when a task fails, 2 on a config or
usage error (in which case no output file is written).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigParse, SurfholError
from .liecore import CROSSED_MODULES
from .scenario import (
    convergence_csv, crossed_module_report, load_scenario_text, report_passed, run_convergence,
    run_scenario, shipped_scenarios,
)

SUBCOMMAND_TASKS = {
    "check-cm": "check-cm",
    "transport-path": "transport-path",
    "transport-surface": "transport-surface",
    "biholonomy": "biholonomy",
    "verify-stokes": "stokes",
    "verify-tgb": "tgb",
    "verify-ptev1a": "ptev1a",
    "verify-reparam": "reparam",
    "plaquette-verify": "plaquette",
    "demo-halfpath": "halfpath",
}


def _common(p):
    p.add_argument("--config", help="scenario file, or the name of a shipped scenario")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--quiet", action="store_true", help="print nothing on success")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="surfhol", description="Path-space parallel transport and surface holonomy checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every task listed in a scenario")
    _common(p)
    p.add_argument("--N", type=int, help="override N_t and N_s")

    for name, task in SUBCOMMAND_TASKS.items():
        p = sub.add_parser(name, help=f"run the {task!r} task")
        _common(p)
        p.add_argument("--N", type=int, help="override N_t and N_s")
        if name in ("check-cm", "plaquette-verify"):
            p.add_argument("--crossed-module", choices=sorted(CROSSED_MODULES),
                           help="without --config: check this crossed module (default: all)")

    p = sub.add_parser("convergence", help="residuals over a sequence of N with fitted order")
    _common(p)
    p.add_argument("--N", type=int, nargs="+", default=[50, 100, 200, 400])
    p.add_argument("--tasks", nargs="+", help="tasks to sweep (default: convergent tasks of the scenario)")
    p.add_argument("--csv", help="write the CSV table here (default: stdout)")

    sub.add_parser("list", help="list shipped scenarios")
    return parser


def _print_report(report, quiet):
    if quiet:
        return
    if report.get("scenario"):
        print(f"scenario {report['scenario']}")
    for t in report["tasks"]:
        tol = "-" if t["tolerance"] is None else f"{t['tolerance']:.1e}"
        status = "PASS" if t["pass"] else "FAIL"
        print(f"  {status}  {t['task']:<22} residual {t['residual']:.3e}  tol {tol}  ({t['wall_time']:.2f}s)")


def _write(path, text):
    Path(path).write_text(text)


def _scenario_report(args, task):
    if args.config is None:
        names = [args.crossed_module] if getattr(args, "crossed_module", None) else sorted(CROSSED_MODULES)
        if task == "check-cm":
            return crossed_module_report(names, 0 if args.seed is None else args.seed)
        if task == "plaquette":
            reports = [run_scenario(f'name = "{n}"\ncrossed_module = "{n}"\n', ["plaquette"],
                                    seed_override=args.seed) for n in names]
            merged = reports[0]
            merged["scenario"] = None
            for r, n in zip(reports, names):
                r["tasks"][0]["task"] = f"plaquette:{n}"
            merged["tasks"] = [r["tasks"][0] for r in reports]
            return merged
        raise ConfigParse("--config is required for this command", field="--config")
    text = load_scenario_text(args.config)
    tasks = None if task is None else [task]
    return run_scenario(text, tasks, n_override=args.N, seed_override=args.seed)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(shipped_scenarios()))
            return 0
        if args.command == "convergence":
            if args.config is None:
                raise ConfigParse("--config is required for convergence", field="--config")
            rows = run_convergence(load_scenario_text(args.config), args.N, args.tasks, args.seed)
            table = convergence_csv(rows)
            if args.csv:
                _write(args.csv, table)
            elif not args.quiet:
                sys.stdout.write(table)
            return 0
        task = None if args.command == "run" else SUBCOMMAND_TASKS[args.command]
        if args.command == "run" and args.config is None:
            raise ConfigParse("--config is required for run", field="--config")
        report = _scenario_report(args, task)
    except ConfigParse as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SurfholError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if args.out:
        _write(args.out, json.dumps(report, indent=2) + "\n")
    _print_report(report, args.quiet)
    return 0 if report_passed(report) else 1


if __name__ == "__main__":
    sys.exit(main())
