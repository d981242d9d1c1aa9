"""Command-line pipeline: generate -> certify -> extract -> stats -> consume-ss.

Exit codes: 0 success, 1 analysis failure (a --gate check did not hold, or
the bit supply ran out mid-analysis), 2 usage or configuration error,
3 I/O or file-parse error.
"""

from __future__ import annotations

import argparse
import sys

from . import certify as certify_mod
from . import extract as extract_mod
from . import stats as stats_mod
from .config import DEFAULT_BUCKET_SIZE, DEFAULT_SS_LIMIT, DEFAULT_SS_WITNESSES, load_config
from .errors import BitSourceExhaustedError, ConfigError, FormatError, ValidationError
from .formats import read_bits, read_trace, write_bits, write_trace
from .primality import BitSource, carmichael_harness
from .protocol import run_batch
from .reports import emit_report

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksqrng",
        description="Simulate and validate a contextuality-certified qutrit RNG pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="run the protocol and write a trace file")
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--out", required=True, help="output trace file")
    p.add_argument("--report", help="write the generation report here instead of stdout")
    p.add_argument("--ideal", action="store_true", help="override noise: run the ideal protocol")
    p.add_argument("--workers", type=int, default=1, help="worker threads (output is identical)")

    p = sub.add_parser("certify", help="certification report from a trace file")
    p.add_argument("--in", dest="infile", required=True, help="input trace file")
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument("--gate", action="store_true", help="exit 1 unless both outcomes certify")

    p = sub.add_parser("extract", help="debias a trace into a packed bit file")
    p.add_argument("--in", dest="infile", required=True, help="input trace file")
    p.add_argument("--out", required=True, help="output bit file")
    p.add_argument("--report", help="write the yield report here instead of stdout")

    p = sub.add_parser("stats", help="entropy, test battery and bucket analysis of a bit file")
    p.add_argument("--in", dest="infile", required=True, help="input bit file")
    p.add_argument("--bucket", type=int, default=DEFAULT_BUCKET_SIZE, help="bucket size in bits")
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument(
        "--gate",
        action="store_true",
        help="exit 1 if more than one applicable battery test fails",
    )

    p = sub.add_parser("consume-ss", help="Solovay-Strassen Carmichael harness over a bit file")
    p.add_argument("--in", dest="infile", required=True, help="input bit file")
    p.add_argument("--limit", type=int, default=DEFAULT_SS_LIMIT, help="test numbers below this")
    p.add_argument("--witnesses", type=int, default=DEFAULT_SS_WITNESSES, help="witnesses per number")
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument("--gate", action="store_true", help="exit 1 unless every number is composite")

    return parser


def _cmd_generate(args) -> int:
    run_config = load_config(args.config)
    protocol_config = run_config.protocol(ideal_override=True if args.ideal else None)
    if args.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {args.workers}")
    stream, summary = run_batch(protocol_config, workers=args.workers)
    write_trace(stream, args.out)
    emit_report(
        [
            ("report", "generate"),
            ("trials", summary.n_trials),
            ("seed", protocol_config.seed),
            ("ideal", protocol_config.ideal),
            ("n0", summary.n0),
            ("n1", summary.n1),
            ("n_discard", summary.n_discard),
            ("p0", summary.p0),
            ("p1", summary.p1),
            ("p_discard", summary.p_discard),
            ("p0_stderr", summary.p0_stderr),
            ("p1_stderr", summary.p1_stderr),
            ("p_discard_stderr", summary.p_discard_stderr),
        ],
        args.report,
    )
    return EXIT_OK


def _cmd_certify(args) -> int:
    stream = read_trace(args.infile)
    report = certify_mod.build_report(stream)
    emit_report(
        [
            ("report", "certify"),
            ("n0", stream.n0),
            ("n1", stream.n1),
            ("n_discard", stream.n_discard),
            ("p0", report.p0),
            ("p1", report.p1),
            ("p_discard", report.p_discard),
            ("p0_stderr", report.p0_stderr),
            ("p1_stderr", report.p1_stderr),
            ("p_discard_stderr", report.p_discard_stderr),
            ("overlap_plus", report.overlap_plus),
            ("overlap_minus", report.overlap_minus),
            ("bound_lo", report.bound_lo),
            ("bound_hi", report.bound_hi),
            ("certified_plus", report.certified_plus),
            ("certified_minus", report.certified_minus),
            ("certified_fraction_raw", report.certified_fraction_raw),
            ("certified_fraction_final", report.certified_fraction_final),
        ],
        args.report,
    )
    if args.gate and not (report.certified_plus and report.certified_minus):
        print("gate failed: at least one outcome is not certified", file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


def _cmd_extract(args) -> int:
    trace = read_trace(args.infile)
    binary = extract_mod.to_bits(trace)
    out, tally = extract_mod.extract_with_tally(binary)
    write_bits(out, args.out)
    zero_fraction = (
        float((binary.bits == 0).sum()) / tally.input_bits if tally.input_bits else float("nan")
    )
    emit_report(
        [
            ("report", "extract"),
            ("input_bits", tally.input_bits),
            ("pairs", tally.pairs),
            ("accepted_pairs", tally.accepted_pairs),
            ("dropped_trailing_bit", tally.dropped_trailing_bit),
            ("output_bits", tally.output_bits),
            ("realized_yield", tally.realized_yield),
            ("input_zero_fraction", zero_fraction),
            ("expected_yield", extract_mod.expected_yield(zero_fraction)),
        ],
        args.report,
    )
    return EXIT_OK


def _cmd_stats(args) -> int:
    bits = read_bits(args.infile)
    report = stats_mod.build_stats_report(bits, args.bucket)
    entries = [
        ("report", "stats"),
        ("n_bits", report.n_bits),
        ("entropy_bits_per_byte", report.entropy_bits_per_byte),
    ]
    for t in report.tests:
        entries.append((f"test.{t.name}.applicable", t.applicable))
        entries.append((f"test.{t.name}.statistic", t.statistic))
        entries.append((f"test.{t.name}.p_value", t.p_value))
        entries.append((f"test.{t.name}.pass", t.passed))
        if t.note:
            entries.append((f"test.{t.name}.note", t.note))
    entries.append(("bucket.size", report.bucket_size))
    entries.append(("bucket.applicable", report.bucket is not None))
    if report.bucket is not None:
        entries.append(("bucket.n_buckets", report.bucket.n_buckets))
        entries.append(("bucket.mean_zero_frequency", report.bucket.mean))
        entries.append(("bucket.stddev", report.bucket.stddev))
        entries.append(
            ("bucket.binomial_stddev", stats_mod.binomial_bucket_stddev(report.bucket_size))
        )
    emit_report(entries, args.report)
    if args.gate:
        applicable = [t for t in report.tests if t.applicable]
        failures = sum(1 for t in applicable if not t.passed)
        if failures > 1:
            print(f"gate failed: {failures} of {len(applicable)} tests failed", file=sys.stderr)
            return EXIT_ANALYSIS
    return EXIT_OK


def _cmd_consume_ss(args) -> int:
    bits = read_bits(args.infile)
    if args.limit < 3:
        raise ConfigError(f"limit must be >= 3, got {args.limit}")
    if args.witnesses < 1:
        raise ConfigError(f"witnesses must be >= 1, got {args.witnesses}")
    result = carmichael_harness(args.limit, BitSource(bits), args.witnesses)
    entries = [
        ("report", "consume-ss"),
        ("limit", args.limit),
        ("max_witnesses", args.witnesses),
        ("numbers_tested", len(result.verdicts)),
    ]
    for v in result.verdicts:
        entries.append((f"ss.{v.number}.verdict", v.verdict))
        entries.append((f"ss.{v.number}.witnesses_used", v.witnesses_used))
        entries.append((f"ss.{v.number}.bits_consumed", v.bits_consumed))
    entries.append(("total_bits_consumed", result.total_bits_consumed))
    entries.append(("total_witnesses", result.total_witnesses))
    entries.append(("all_composite", result.all_composite))
    emit_report(entries, args.report)
    if args.gate and not result.all_composite:
        print("gate failed: some numbers were not declared composite", file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "certify": _cmd_certify,
    "extract": _cmd_extract,
    "stats": _cmd_stats,
    "consume-ss": _cmd_consume_ss,
}


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BitSourceExhaustedError as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
