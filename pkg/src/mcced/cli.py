"""Command-line interface.

Subcommands
-----------
``run SCENARIO --out DIR [--seed N]``
    Execute a scenario — a TOML file path or a builtin name — and write
    its artifacts (trajectory table, ledger, optional series, manifest)
    into DIR.
``list-scenarios``
    List the builtin scenarios with one-line descriptions.
``plot MANIFEST --quantity Q``
    Print whitespace-delimited plot data for one recorded quantity of a
    finished run (MANIFEST is the manifest.json path or the run
    directory).
``algebra SCRIPT``
    Evaluate an exact operator-algebra script and print its results.
``check [--suite NAME]``
    Run a suite of the numbered acceptance checks and print one
    pass/fail line per check.

Exit codes: 0 success, 1 failure (numerical or check failure), 2 usage,
3 parse error, 4 convergence error, 5 horizon error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import (
    ConvergenceError,
    HorizonError,
    MccedError,
    ParseError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CONVERGENCE = 4
EXIT_HORIZON = 5


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, HorizonError):
        return EXIT_HORIZON
    if isinstance(exc, MccedError):
        return EXIT_FAILURE
    if isinstance(exc, (ValueError, KeyError, OSError)):
        return EXIT_USAGE
    return EXIT_FAILURE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcced",
        description=(
            "Deterministic simulator and verification suite for the"
            " classical electrodynamics of point charges under the"
            " measurement-color coupling topology."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and write artifacts")
    run.add_argument("scenario", help="TOML scenario file or builtin name")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument(
        "--seed",
        type=int,
        default=None,
        help="recorded in the manifest; runs are deterministic and do not use it",
    )

    sub.add_parser("list-scenarios", help="list builtin scenarios")

    plot = sub.add_parser("plot", help="print plot data for a finished run")
    plot.add_argument("manifest", help="manifest.json path or run directory")
    plot.add_argument("--quantity", required=True, help="recorded quantity to emit")

    algebra = sub.add_parser("algebra", help="evaluate an operator-algebra script")
    algebra.add_argument("script", help="script file path")

    check = sub.add_parser("check", help="run acceptance checks")
    check.add_argument(
        "--suite",
        default="all",
        help="fields, dynamics, symmetry, algebra, or all (default)",
    )
    return parser


def _cmd_run(args) -> int:
    from .runner import run_document
    from .scenario_io import builtin_names, load_builtin, load_scenario_file

    if args.scenario in builtin_names():
        doc = load_builtin(args.scenario)
    else:
        doc = load_scenario_file(args.scenario)
    result = run_document(doc, args.out, seed=args.seed)
    manifest = result.manifest
    print(f"scenario: {manifest['scenario']['name']} ({manifest['scenario']['kind']})")
    for entry in manifest["files"]:
        print(f"  wrote {os.path.join(args.out, entry['name'])} ({entry['rows']} rows)")
    print(f"  wrote {result.manifest_path}")
    failed = []
    for name, outcome in manifest.get("checks", {}).items():
        verdict = "pass" if outcome.get("passed") else "FAIL"
        print(f"  check {name}: {verdict}")
        if not outcome.get("passed"):
            failed.append(name)
    return EXIT_FAILURE if failed else EXIT_OK


def _cmd_list(args) -> int:
    from .scenario_io import builtin_descriptions

    for name, description in builtin_descriptions().items():
        print(f"{name:<20s} {description}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .runner import emit_plotdata

    sys.stdout.write(emit_plotdata(args.manifest, args.quantity))
    return EXIT_OK


def _cmd_algebra(args) -> int:
    from .algebra_expr import evaluate_file

    for line in evaluate_file(args.script):
        print(line)
    return EXIT_OK


def _cmd_check(args) -> int:
    from .checks import SUITES, run_checks

    if args.suite not in SUITES:
        raise ValueError(
            f"unknown suite {args.suite!r}; expected one of {', '.join(sorted(SUITES))}"
        )
    results = run_checks(args.suite)
    for result in results:
        print(result.line())
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_FAILURE


_COMMANDS = {
    "run": _cmd_run,
    "list-scenarios": _cmd_list,
    "plot": _cmd_plot,
    "algebra": _cmd_algebra,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except (MccedError, ValueError, KeyError, OSError) as exc:
        code = _exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
