"""Command-line entry point: ``tubal <command> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, tensorfile


def _int_list(text: str) -> list:
    try:
        vals = [int(v) for v in text.replace("x", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive, got {text!r}")
    return vals


def cmd_hilbert(args) -> int:
    result = bench.hilbert_demo()
    print(bench.format_hilbert(result))
    return 0 if result["norms_ok"] else 1


def cmd_bench(args) -> int:
    trunc = args.trunc[0] if len(args.trunc) == 1 else args.trunc
    try:
        report = bench.bench_random(args.dims, args.rank, args.beta, trunc, args.trials,
                                    args.seed, threads=args.threads)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(report.summary(), file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_compress(args) -> int:
    try:
        m = bench.compress(args.input, args.trunc, args.algo, args.out, reference=args.reference)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"relative error {m['err']:.6g} (bound {m['bound']:.6g}); factors in {args.out}")
    return 0


def cmd_decompress(args) -> int:
    try:
        res = bench.decompress(args.factors, args.out, original=args.original)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if res["err"] is None:
        print(f"wrote {args.out}; original not available, manifest error {res['manifest_err']:.6g}")
    else:
        print(f"wrote {args.out}; relative error {res['err']:.6g} (manifest {res['manifest_err']:.6g})")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run
    return run(inject_fault=args.inject_fault)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tubal", description="Tubal tensor decompositions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hilbert-demo", help="Hot-SVD of the 2x2x2x2 Hilbert tensor")
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("bench-random", help="recover random low-rank tensors")
    p.add_argument("--dims", type=_int_list, required=True, help="I_1,...,I_N,p")
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--trunc", type=_int_list, required=True,
                   help="core size for every non-tubal mode, or one per mode")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=None, help="defaults to $TUBAL_THREADS or 1")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compress", help="truncated Hot-SVD of a tensor file")
    p.add_argument("input")
    p.add_argument("--trunc", type=_int_list, required=True)
    p.add_argument("--algo", choices=("tr", "seq"), default="seq")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--reference", help="tensor file to compare the reconstruction against")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="rebuild a tensor from a factor directory")
    p.add_argument("factors")
    p.add_argument("--out", required=True)
    p.add_argument("--original", help="tensor file to measure the error against")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except tensorfile.TensorFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
