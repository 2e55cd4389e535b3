"""Command-line front end.

    reserve-sim --scenario FILE [--table] [--csv PATH] [--dump PATH]
                [--strict] [--cycles N] [--params key=value ...]
    reserve-sim --ingest FILE [--ingest FILE ...] --ratio LABEL_A LABEL_B
                [--csv PATH]

Exit statuses: 0 success, 2 parse/ingest error, 3 invariant violation
during a run (partial series is still flushed, with the failure marker),
4 a lending request was refused and --strict was set.
"""

from __future__ import annotations

import argparse
import sys

from .errors import LedgerError, ScenarioError
from .scenario import load_scenario, run_scenario
from .seriesio import (
    expansion_to_csv,
    external_to_csv,
    ingest_csv,
    ratio_report,
    render_dump,
    render_expansion_table,
    render_table,
    series_to_csv,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_STRICT_BREACH = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reserve-sim",
        description="Deterministic multi-bank reserve-banking simulator",
    )
    parser.add_argument("--scenario", help="scenario file to run")
    parser.add_argument("--table", action="store_true", help="print balance-sheet tables")
    parser.add_argument("--csv", help="write series CSV to this path ('-' for stdout)")
    parser.add_argument("--dump", help="write full text dump to this path ('-' for stdout)")
    parser.add_argument(
        "--strict",
        action="store_true",
        help="exit 4 if any lending request was refused",
    )
    parser.add_argument("--cycles", type=int, help="override the generator cycle count")
    parser.add_argument(
        "--params",
        nargs="*",
        default=[],
        metavar="KEY=VALUE",
        help="override regulatory parameters",
    )
    parser.add_argument(
        "--ingest",
        action="append",
        default=[],
        metavar="CSV",
        help="ingest an external CSV (first column is the period)",
    )
    parser.add_argument(
        "--ratio",
        nargs=2,
        metavar=("LABEL_A", "LABEL_B"),
        help="emit the pointwise LABEL_A / LABEL_B series",
    )
    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_param_overrides(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ScenarioError(f"malformed --params entry {pair!r}")
        overrides[key] = value
    return overrides


def _run_ratio(args) -> int:
    if not args.ratio:
        print("--ingest requires --ratio LABEL_A LABEL_B", file=sys.stderr)
        return EXIT_PARSE
    label_a, label_b = args.ratio
    series: dict = {}
    try:
        for path in args.ingest:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            wanted = [l for l in (label_a, label_b) if l not in series]
            found = []
            for label in wanted:
                try:
                    found.append(ingest_csv(text, [label])[label])
                except ValueError:
                    continue
            for item in found:
                series[item.label] = item
        missing = [l for l in (label_a, label_b) if l not in series]
        if missing:
            raise ValueError(f"column(s) {missing} not found in ingested CSVs")
        result = ratio_report(series[label_a], series[label_b])
    except (ValueError, OSError) as exc:
        print(f"ingest error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(args.csv or "-", external_to_csv(result))
    return EXIT_OK


def _run_scenario(args) -> int:
    try:
        spec = load_scenario(args.scenario)
        overrides = _parse_param_overrides(args.params)
        result = run_scenario(spec, cycles_override=args.cycles, param_overrides=overrides)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LedgerError as exc:
        print(f"operation refused: {exc}", file=sys.stderr)
        return 1

    outputs = list(spec.outputs)
    if args.csv:
        outputs.append(("csv", args.csv))
    if args.dump:
        outputs.append(("dump", args.dump))
    if args.table:
        outputs.append(("table", "-"))

    if result.kind == "expansion":
        for fmt, path in outputs:
            if fmt == "csv":
                _write(path, expansion_to_csv(result.expansion))
            elif fmt in ("table", "dump"):
                _write(path, render_expansion_table(result.expansion))
        return EXIT_OK

    series = result.metrics
    for fmt, path in outputs:
        if fmt == "csv":
            _write(path, series_to_csv(series))
        elif fmt == "table":
            _write(path, render_table(series))
        elif fmt == "dump":
            _write(path, render_dump(series))

    if series.failed:
        print(f"invariant violation: {series.failure_reason}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.strict and series.breaches:
        for breach in series.breaches:
            print(
                f"refused at step {breach.step}: {breach.operation}: {breach.detail}",
                file=sys.stderr,
            )
        return EXIT_STRICT_BREACH
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.ingest:
        return _run_ratio(args)
    if not args.scenario:
        print("nothing to do: pass --scenario or --ingest", file=sys.stderr)
        return EXIT_PARSE
    return _run_scenario(args)


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
