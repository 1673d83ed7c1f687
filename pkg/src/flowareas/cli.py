"""Command line entry point: ``flowareas analyze`` and ``flowareas synth``.

Exit codes: 0 success, 2 configuration error, 3 parse error, 4 analysis error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .clustering import DEFAULT_KS
from .errors import AnalysisError, ConfigError, ParseError
from .eventlog import CsvMapping, parse_csv, parse_xes, write_csv
from .features import PROFILES
from .influence import DimensionConfig
from .pipeline import DEFAULT_SAMPLE_SIZE, run_pipeline
from .report import FORMATS, write_report
from .synthgen import SynthSpec, generate

EXIT_CONFIG, EXIT_PARSE, EXIT_ANALYSIS = 2, 3, 4


def _int_list(tokens) -> list[int]:
    out = []
    for tok in tokens:
        for part in str(tok).split(","):
            if part.strip():
                try:
                    out.append(int(part))
                except ValueError:
                    raise ConfigError(f"not an integer: {part!r}") from None
    return out


def _split(tokens) -> list[str]:
    return [p.strip() for tok in tokens for p in str(tok).split(",") if p.strip()]


def _guess_format(path: str) -> str:
    low = path.lower()
    if low.endswith((".xes", ".xes.gz")):
        return "xes"
    if low.endswith(".csv"):
        return "csv"
    raise ConfigError(f"cannot infer input format of {path!r}; pass --format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowareas", description=(
        "Find business areas (case attribute values) that shape process flow."))
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="cluster cases by flow and rank business areas")
    a.add_argument("--input", required=True, help="event log path (.xes, .xes.gz or .csv)")
    a.add_argument("--format", choices=("xes", "csv"), help="input format (default: from extension)")
    a.add_argument("--case-col", default="case_id", help="CSV case id column (default: case_id)")
    a.add_argument("--activity-col", default="activity", help="CSV activity column (default: activity)")
    a.add_argument("--time-col", default=None, help="CSV timestamp column (default: none)")
    a.add_argument("--time-format", default=None, help="strptime pattern for --time-col (default: ISO-8601)")
    a.add_argument("--sample-size", type=int, default=DEFAULT_SAMPLE_SIZE,
                   help=f"cases to sample, 0 for all (default: {DEFAULT_SAMPLE_SIZE})")
    a.add_argument("--seed", type=int, default=42, help="master seed (default: 42)")
    a.add_argument("--ks", nargs="+", default=[",".join(map(str, DEFAULT_KS))],
                   help="cluster counts, e.g. 2,3,5,10 (default)")
    a.add_argument("--profiles", nargs="+", default=[",".join(PROFILES)],
                   help="feature profiles: activity, transition (default: both)")
    a.add_argument("--top-areas", type=int, default=20, help="rows of the area table (default: 20)")
    a.add_argument("--top-per-cluster", type=int, default=5, help="areas per cluster (default: 5)")
    a.add_argument("--dimensions", default=None, help="dimension config, JSON or TOML (default: all case attributes)")
    a.add_argument("--out", default=None, help="output prefix (default: input path without extension)")
    a.add_argument("--emit", nargs="+", default=["md,csv,json"], help="report formats: md, csv, json (default: all)")
    a.add_argument("--max-iter", type=int, default=100, help="k-modes iteration cap (default: 100)")
    a.add_argument("--workers", type=int, default=1, help="parallel clustering runs (default: 1)")
    a.add_argument("--timings", action="store_true", help="record step timings in the report")
    a.add_argument("--strict", action="store_true", help="treat data quality problems as errors")

    s = sub.add_parser("synth", help="generate a synthetic CSV event log")
    s.add_argument("spec", help="generator spec, JSON or TOML")
    s.add_argument("output", help="CSV path to write")
    return parser


def cmd_analyze(args) -> int:
    fmt = args.format or _guess_format(args.input)
    ks = _int_list(args.ks)
    profiles = _split(args.profiles)
    emit = _split(args.emit)
    if not ks:
        raise ConfigError("--ks needs at least one value")
    unknown = [f for f in emit if f not in FORMATS]
    if unknown:
        raise ConfigError(f"unknown --emit formats {unknown}; choose from md, csv, json")
    if args.sample_size < 0:
        raise ConfigError("--sample-size must be >= 0")
    dims = DimensionConfig.load(args.dimensions) if args.dimensions else None
    if not os.path.exists(args.input):
        raise ConfigError(f"input file not found: {args.input}")
    if fmt == "xes":
        log = parse_xes(args.input, strict=args.strict)
    else:
        mapping = CsvMapping(args.case_col, args.activity_col, args.time_col, args.time_format)
        log = parse_csv(args.input, mapping, strict=args.strict)
    result = run_pipeline(
        log, sample_size=args.sample_size or None, seed=args.seed, ks=ks, profiles=profiles,
        dimensions=dims, top_per_cluster=args.top_per_cluster, top_areas=args.top_areas,
        max_iter=args.max_iter, workers=args.workers, timings=args.timings)
    prefix = args.out
    if prefix is None:
        prefix = args.input
        for ext in (".xes.gz", ".xes", ".csv"):
            if prefix.lower().endswith(ext):
                prefix = prefix[: -len(ext)]
                break
    for path in write_report(result.report, prefix, emit):
        print(path)
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec.load(args.spec)
    write_csv(generate(spec), args.output)
    print(args.output)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return cmd_analyze(args) if args.command == "analyze" else cmd_synth(args)
    except ConfigError as exc:
        print(f"flowareas: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"flowareas: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (AnalysisError, ValueError) as exc:
        print(f"flowareas: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except OSError as exc:
        print(f"flowareas: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
