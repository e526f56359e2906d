"""
Command-line driver for the Kunz workbench.

Subcommands:
    check   run the check directives of a .kz file (or one named map)
    corpus  run the corpus, the Kunz cross-check and the property suites

Exit codes: 0 all checks pass, 2 a check failed (or a KunzViolation),
3 budget exhausted, 4 parse/semantic error in the input.

Usage:
    python kunz_cli.py check Data/kz/artin_schreier.kz --json
    python kunz_cli.py check Data/kz/artin_schreier.kz --map f --budget 5000
    python kunz_cli.py corpus --filter PROOT-TOWER --out Data/reports/proot_tower.json
    python kunz_cli.py corpus --workers 4 --selfcheck 1000 --seed 7
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from data_utils import (
    config_value,
    debug_log,
    ensure_dir,
    get_data_paths,
    load_kunz_config,
    resolve_budget,
)
from dsl import CheckDirective, load
from kunz_errors import BudgetExceeded, DslError, KunzViolation
from verdict import (
    ENGINE_VERSION,
    FAIL,
    SCHEMA_VERSION,
    UNDECIDED,
    adjunction_suite,
    build_report,
    corpus_run,
    crosscheck_frame,
    deformation_suite,
    kunz_crosscheck,
    run_check,
    selfcheck,
    stability_suite,
    summarize,
)

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4


def exit_code(summary: Dict[str, int]) -> int:
    if summary.get(FAIL):
        return EXIT_FAIL
    if summary.get(UNDECIDED):
        return EXIT_BUDGET
    return EXIT_OK


def dump_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, default=str) + "\n"


def _write(report: Dict[str, Any], out: Optional[str], verbose: bool):
    if not out:
        return
    path = Path(out)
    ensure_dir(path.parent)
    path.write_text(dump_report(report), encoding="utf-8")
    if verbose:
        print(f"Report written: {path}")


def _violation(exc: KunzViolation) -> int:
    print(f"[ERROR] KunzViolation: {exc}", file=sys.stderr)
    print(json.dumps(exc.witness, indent=2, ensure_ascii=False, default=str), file=sys.stderr)
    debug_log("kunz", "kunz_cli", "KunzViolation", {"message": str(exc), "witness": exc.witness})
    return EXIT_FAIL


def _check_summary(entry: Dict[str, Any]) -> str:
    result = entry.get("result") or {}
    if entry["kind"] == "omega":
        return f"omega_zero={result.get('omega_zero')}"
    if entry["kind"] == "frobenius":
        return f"{result.get('mode')}(e={result.get('e')})={result.get('value')}"
    if entry["kind"] in ("kunz", "classify"):
        return ", ".join(result.get("classification", [])) or str(result.get("kind"))
    if entry["kind"] == "lifts":
        return f"lifts={result.get('lifts', result.get('status'))}"
    return ""


def cmd_check(path: str, map_name: Optional[str], budget: int, config: Dict[str, Any],
              emax: Optional[int] = None, seed: int = 0, as_json: bool = False,
              out: Optional[str] = None, timings: bool = False, verbose: bool = True) -> int:
    """Run every check directive of a file, or the ones aimed at map_name."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"[ERROR] cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        elab = load(text, budget)
        checks: List[CheckDirective] = list(elab.checks)
        if map_name:
            elab.resolve(map_name)
            checks = [c for c in checks if c.target == map_name] or [CheckDirective("kunz", map_name)]
        elif not checks:
            checks = [CheckDirective("kunz", name) for name in elab.maps]
        if emax is not None:
            checks = [CheckDirective(c.kind, c.target,
                                     [(k, v) for k, v in c.options if k != "emax"]
                                     + ([("emax", str(emax))] if c.kind in ("kunz", "classify") else []),
                                     c.span) for c in checks]
    except DslError as exc:
        print(f"[ERROR] {path}:{exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"[ERROR] {path}: {exc}", file=sys.stderr)
        return EXIT_BUDGET

    if verbose and not as_json:
        print("=" * 60)
        print(f"Kunz check: {path}")
        print("=" * 60)
        print(f"Budget: {budget}, checks: {len(checks)}")

    results = []
    try:
        for chk in checks:
            results.append(run_check(elab, chk, budget, config, timings))
    except KunzViolation as exc:
        return _violation(exc)
    except DslError as exc:
        print(f"[ERROR] {path}:{exc}", file=sys.stderr)
        return EXIT_INPUT

    summary = summarize([r["status"] for r in results])
    report = {
        "schema_version": SCHEMA_VERSION,
        "engine_version": ENGINE_VERSION,
        "file": str(path),
        "seed": seed,
        "budget": budget,
        "checks": results,
        "summary": summary,
    }
    if as_json:
        sys.stdout.write(dump_report(report))
    else:
        table = pd.DataFrame([{"directive": r["directive"], "status": r["status"],
                               "result": _check_summary(r)} for r in results])
        print(table.to_string(index=False))
        print(f"\nSummary: {summary}")
    _write(report, out, verbose and not as_json)
    return exit_code(summary)


def cmd_corpus(pattern: Optional[str], budget: int, config: Dict[str, Any],
               emax: Optional[int] = None, seed: int = 0, as_json: bool = False,
               out: Optional[str] = None, workers: Optional[int] = None,
               selfcheck_samples: int = 0, timings: bool = False, suites: bool = True,
               verbose: bool = True) -> int:
    """corpus_run + kunz_crosscheck (+ suites when unfiltered); writes the JSON report."""
    chatty = verbose and not as_json
    timings = timings or bool(config_value(config, "report.timings", False))
    limit = int(config_value(config, "budget.enumeration", 10 ** 6))
    try:
        entries = corpus_run(pattern, config, budget, emax, workers, timings, chatty)
        extra: Dict[str, Any] = {"kunz_crosscheck": kunz_crosscheck(entries)}
        if suites and not pattern:
            if chatty:
                print("Stability, deformation and adjunction suites...")
            extra["stability"] = stability_suite(budget)
            extra["deformation"] = deformation_suite(entries, budget, limit)
            extra["adjunction"] = adjunction_suite(budget=budget, limit=limit)
        if selfcheck_samples:
            if chatty:
                print(f"Engine self-checks ({selfcheck_samples} samples per ring, seed {seed})...")
            extra["selfcheck"] = selfcheck(selfcheck_samples, seed, budget)
    except KunzViolation as exc:
        return _violation(exc)

    report = build_report(entries, seed, budget, extra)
    if as_json:
        sys.stdout.write(dump_report(report))
    else:
        frame = pd.DataFrame([{"name": e["name"], "kind": e["kind"], "status": e["status"]}
                              for e in report["cases"]])
        print(frame.to_string(index=False))
        print()
        print(crosscheck_frame(extra["kunz_crosscheck"]).to_string(index=False))
        print(f"\nDisagreements: {extra['kunz_crosscheck']['disagreements']}")
        print(f"Summary: {report['summary']}")
    if out is None:
        out = str(get_data_paths()['reports'] / "corpus_report.json")
    _write(report, out, chatty)
    return exit_code(report["summary"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Kähler differentials vs relative Frobenius over F_p'
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='Write the JSON report to stdout')
    common.add_argument('--budget', type=int, default=None,
                        help='Reduction-step budget per Groebner computation (default: KUNZ_BUDGET or config)')
    common.add_argument('--emax', type=int, default=None, help='Largest Frobenius iterate (default 2)')
    common.add_argument('--seed', type=int, default=0, help='Seed for randomized suites')
    common.add_argument('--out', type=str, default=None, help='Write the JSON report to PATH')
    common.add_argument('--timings', action='store_true', help='Record millis per case')
    common.add_argument('--quiet', action='store_true', help='Suppress verbose output')

    sub = parser.add_subparsers(dest='command')
    p_check = sub.add_parser('check', parents=[common], help='Run the checks of a .kz file')
    p_check.add_argument('file', type=str, help='Input .kz file')
    p_check.add_argument('--map', dest='map_name', type=str, default=None,
                         help='Only checks on this map (runs kunz if it has none)')

    p_corpus = sub.add_parser('corpus', parents=[common], help='Run the corpus')
    p_corpus.add_argument('--filter', type=str, default=None,
                          help='Glob on case or family names (a bare prefix is allowed)')
    p_corpus.add_argument('--workers', type=int, default=None, help='Parallel cases (dask threads)')
    p_corpus.add_argument('--selfcheck', type=int, nargs='?', const=-1, default=0,
                          help='Engine self-checks with N samples per ring (config default if N omitted)')
    p_corpus.add_argument('--no-suites', action='store_true',
                          help='Skip stability, deformation and adjunction suites')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT

    config = load_kunz_config()
    try:
        budget = resolve_budget(args.budget, config)
    except ValueError as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.emax is not None and args.emax < 1:
        print("[ERROR] --emax must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    verbose = not args.quiet

    if args.command == 'check':
        return cmd_check(args.file, args.map_name, budget, config, args.emax, args.seed,
                         args.json, args.out, args.timings, verbose)

    samples = args.selfcheck
    if samples == -1:
        samples = int(config_value(config, "selfcheck.samples", 1000))
    return cmd_corpus(args.filter, budget, config, args.emax, args.seed, args.json, args.out,
                      args.workers, samples, args.timings, not args.no_suites, verbose)


if __name__ == '__main__':
    sys.exit(main())
