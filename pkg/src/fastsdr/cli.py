"""Command-line interface: eval, bench, and selftest subcommands.

Exit codes: 0 success, 1 selftest failure, 2 file/format errors,
3 input validation errors, 4 solver failures. Errors are emitted to
stderr as a single JSON object so callers can parse them.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .bench import format_table, run_benchmark
from .errors import SolverError, ValidationError
from .metrics import bss_eval
from .selftest import format_report, run_selftest
from .signals import EvalConfig
from .wavio import load_signal_set

EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4


def _emit_error(exc: Exception, code: int) -> int:
    doc = {"error": {"type": type(exc).__name__, "code": code, "message": str(exc)}}
    print(json.dumps(doc), file=sys.stderr)
    return code


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("FASTSDR_THREADS", "1")))
    except ValueError:
        return 1


def _add_eval_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--filter-length", type=int, default=512, help="distortion filter taps L")
    p.add_argument("--solver", choices=("cgd", "direct", "levinson"), default="cgd")
    p.add_argument("--iters", type=int, default=10, help="conjugate-gradient iterations")
    p.add_argument("--tol", type=float, default=0.0,
                   help="relative residual stop; 0 runs a fixed iteration count")
    p.add_argument("--precision", choices=("f64", "f32"), default="f64")
    p.add_argument("--metrics", default="sdr,sir,sar",
                   help="comma-separated subset of sdr,sir,sar")
    p.add_argument("--clamp-epsilon", type=float, default=None,
                   help="override the ratio clamp half-width")
    p.add_argument("--threads", type=int, default=None,
                   help="FFT worker threads (default: FASTSDR_THREADS or 1)")


_PRECISION_NAMES = {"f64": "double", "f32": "single"}


def _parse_config(args) -> EvalConfig:
    metrics = frozenset(m.strip() for m in args.metrics.split(",") if m.strip())
    return EvalConfig(
        filter_length=args.filter_length,
        solver=args.solver,
        cgd_iters=args.iters,
        cgd_tol=args.tol,
        precision=_PRECISION_NAMES[args.precision],
        metrics=metrics,
        resolve_permutation=not getattr(args, "no_permutation", False),
        clamp_epsilon=args.clamp_epsilon,
    )


def _eval_document(args, cfg, refs, ests, result) -> dict:
    return {
        "config": {
            "references": list(args.refs),
            "estimates": list(args.ests),
            "sample_rate": refs.sample_rate,
            "num_samples": refs.num_samples,
            "num_references": refs.channels,
            "num_estimates": ests.channels,
            "filter_length": cfg.filter_length,
            "solver": cfg.solver,
            "cgd_iters": cfg.cgd_iters,
            "cgd_tol": cfg.cgd_tol,
            "precision": {"double": "f64", "single": "f32"}[cfg.precision],
            "metrics": sorted(cfg.metrics),
            "resolve_permutation": cfg.resolve_permutation,
            "clamp_epsilon": cfg.clamp,
            "version": __version__,
        },
        "results": result.to_dict(),
        "diagnostics": result.diagnostics.as_dict(),
    }


def _eval_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["role", "reference", "estimate", "sdr", "sir", "sar"])

    def cell(table, *idx):
        if table is None:
            return ""
        v = table[idx]
        return "" if v is None else repr(float(v))

    K = result.cosines.single.shape[0]
    M = result.cosines.single.shape[1]
    for k in range(K):
        for m in range(M):
            writer.writerow([
                "pair", k, m,
                cell(result.sdr, k, m), cell(result.sir, k, m), cell(result.sar, m),
            ])
    if result.permutation is not None:
        for k, m in enumerate(result.permutation):
            if m is None:
                writer.writerow(["assignment", k, "", "", "", ""])
            else:
                writer.writerow([
                    "assignment", k, m,
                    cell(result.sdr, k, m), cell(result.sir, k, m), cell(result.sar, m),
                ])
    return buf.getvalue()


def _cmd_eval(args) -> int:
    try:
        refs = load_signal_set(args.refs)
        ests = load_signal_set(args.ests)
    except ValidationError as exc:
        return _emit_error(exc, EXIT_VALIDATION)
    except (OSError, ValueError) as exc:
        return _emit_error(exc, EXIT_IO)

    try:
        cfg = _parse_config(args)
    except ValueError as exc:
        return _emit_error(exc, EXIT_VALIDATION)

    threads = args.threads if args.threads is not None else _default_threads()
    try:
        result = bss_eval(refs, ests, cfg, workers=threads)
    except ValidationError as exc:
        return _emit_error(exc, EXIT_VALIDATION)
    except SolverError as exc:
        return _emit_error(exc, EXIT_SOLVER)

    if args.output == "json":
        text = json.dumps(_eval_document(args, cfg, refs, ests, result), indent=2)
    else:
        text = _eval_csv(result)
    _write_output(text, args.output_path)
    return 0


def _cmd_bench(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        metrics = frozenset(m.strip() for m in args.metrics.split(",") if m.strip())
        cells = run_benchmark(
            channels=tuple(args.channels),
            durations=tuple(args.durations),
            filter_lengths=tuple(args.filter_lengths),
            solvers=tuple(args.solvers),
            sample_rate=args.sample_rate,
            batch=args.batch,
            repeats=args.repeats,
            seed=args.seed,
            metrics=metrics,
            cgd_iters=args.iters,
            precision=_PRECISION_NAMES[args.precision],
            workers=threads,
        )
    except ValueError as exc:
        return _emit_error(exc, EXIT_VALIDATION)

    if args.output == "json":
        doc = {
            "config": {
                "channels": list(args.channels),
                "durations": list(args.durations),
                "filter_lengths": list(args.filter_lengths),
                "solvers": list(args.solvers),
                "sample_rate": args.sample_rate,
                "batch": args.batch,
                "repeats": args.repeats,
                "seed": args.seed,
                "metrics": sorted(metrics),
                "threads": threads,
                "version": __version__,
            },
            "cells": [c.as_dict() for c in cells],
        }
        text = json.dumps(doc, indent=2)
    else:
        text = format_table(cells)
    _write_output(text, args.output_path)
    return 0


def _cmd_selftest(args) -> int:
    passed, checks = run_selftest(zero_tolerance=args.zero_tol)
    if args.output == "json":
        text = json.dumps({"passed": passed, "checks": checks}, indent=2)
    else:
        text = format_report(checks)
    _write_output(text, args.output_path)
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastsdr",
        description="Source-separation metrics (SDR/SIR/SAR/SI-SDR) over WAV files",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate metrics for one reference/estimate pairing")
    p_eval.add_argument("--refs", nargs="+", required=True, metavar="WAV",
                        help="reference WAV files; channels concatenate in order")
    p_eval.add_argument("--ests", nargs="+", required=True, metavar="WAV",
                        help="estimate WAV files; channels concatenate in order")
    _add_eval_options(p_eval)
    p_eval.add_argument("--no-permutation", action="store_true",
                        help="skip the reference/estimate assignment")
    p_eval.add_argument("--output", choices=("json", "csv"), default="json")
    p_eval.add_argument("--output-path", default="-", help="file path or - for stdout")
    p_eval.set_defaults(fn=_cmd_eval)

    p_bench = sub.add_parser("bench", help="time synthetic evaluation workloads")
    p_bench.add_argument("--channels", nargs="*", type=int, default=[2])
    p_bench.add_argument("--durations", nargs="*", type=float, default=[5.0],
                         help="signal lengths in seconds")
    p_bench.add_argument("--filter-lengths", nargs="*", type=int, default=[512])
    p_bench.add_argument("--solvers", nargs="*", choices=("cgd", "direct", "levinson"),
                         default=["cgd"])
    p_bench.add_argument("--sample-rate", type=float, default=16000.0)
    p_bench.add_argument("--batch", type=int, default=10, help="evaluations per timed pass")
    p_bench.add_argument("--repeats", type=int, default=10, help="timed passes per cell")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--metrics", default="sdr,sir,sar")
    p_bench.add_argument("--iters", type=int, default=10)
    p_bench.add_argument("--precision", choices=("f64", "f32"), default="f64")
    p_bench.add_argument("--threads", type=int, default=None)
    p_bench.add_argument("--output", choices=("text", "json"), default="text")
    p_bench.add_argument("--output-path", default="-")
    p_bench.set_defaults(fn=_cmd_bench)

    p_self = sub.add_parser("selftest", help="run built-in numerical checks")
    p_self.add_argument("--zero-tol", action="store_true",
                        help="force zero tolerances so every check fails")
    p_self.add_argument("--output", choices=("text", "json"), default="text")
    p_self.add_argument("--output-path", default="-")
    p_self.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
