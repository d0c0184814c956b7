"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 shape, domain or
resource errors, 3 verification tolerance violated.
"""

from __future__ import annotations

import argparse
import sys

from . import bench, formats, kernels
from .errors import DomainError, FormatError, ResourceError
from .oracle import DEFAULT_CAP
from .pipeline import qram_traced
from .state import TreeShape
from .verify import run_checks

EXIT_OK, EXIT_PARSE, EXIT_SHAPE, EXIT_TOLERANCE = 0, 1, 2, 3


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    shape = TreeShape(args.n, args.m)
    mem = formats.parse_memory(_read(args.memory), shape)
    addrs = formats.parse_addresses(_read(args.addresses), shape, normalize=args.normalize)
    with kernels.use_threads(args.threads):
        final, trace = qram_traced(shape, addrs, mem)
    if args.trace:
        # the trace ends with the final state
        text = formats.trace_to_json(trace) if args.format == "json" else formats.serialize_trace(trace)
    else:
        text = formats.state_json(final) if args.format == "json" else formats.serialize_state(final)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    shape = TreeShape(args.n, args.m)
    failed = 0
    lines = []
    for result in run_checks(shape, trials=args.trials, seed=args.seed, cap=args.cap):
        lines.append(result.line())
        failed += not result.passed
    lines.append(f"{'FAILED' if failed else 'OK'}: {len(lines) - failed}/{len(lines)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_TOLERANCE if failed else EXIT_OK


def cmd_bench(args) -> int:
    names = kernels.available_backends() if args.backend == "both" else [args.backend]
    names = [kernels.get_backend(name).NAME for name in names]
    rows = bench.sweep(args.n, args.m, args.count, args.reps, seed=args.seed, backends=names)
    out = [f"{'backend':<9} {'n':>3} {'|A|':>5} {'steps':>5} {'support':>8} {'us/call':>10}"]
    for row in rows:
        support = "const" if row.support_constant else "VARIES"
        out.append(
            f"{row.backend:<9} {row.n:>3} {row.addresses:>5} {row.steps:>5} {support:>8} "
            f"{row.seconds_per_call * 1e6:>10.2f}"
        )
    for name in names:
        sel = [r for r in rows if r.backend == name]
        if len(sel) >= 2:
            ok, slope, intercept, _ = bench.linear_fit([r.n for r in sel], [r.seconds_per_call for r in sel])
            out.append(
                f"{name}: fit t = {intercept * 1e6:.2f} + {slope * 1e6:.3f} n us; "
                f"within 2x of linear fit: {'yes' if ok else 'no'}"
            )
    if len(names) == 2:
        by = {(r.backend, r.n): r.seconds_per_call for r in rows}
        for n in args.n:
            out.append(f"n={n}: python/compiled = {by[('python', n)] / by[('compiled', n)]:.2f}x")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwqram", description="Quantum-walk bucket-brigade qRAM simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="query a memory with an address superposition")
    run.add_argument("--n", type=int, required=True, help="address width")
    run.add_argument("--m", type=int, required=True, help="data width")
    run.add_argument("--memory", required=True, help="memory file (ADDRESS<TAB>DATA)")
    run.add_argument("--addresses", required=True, help="address file (ADDRESS<TAB>RE[<TAB>IM])")
    run.add_argument("--trace", action="store_true", help="emit every intermediate state")
    run.add_argument("--out", help="output path (default stdout)")
    run.add_argument("--no-normalize", dest="normalize", action="store_false")
    run.add_argument("--format", choices=("dump", "json"), default="dump")
    run.add_argument("--threads", type=int, default=1, help="entry-parallel kernel threads")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="dense-oracle checks at small sizes")
    verify.add_argument("--n", type=int, required=True)
    verify.add_argument("--m", type=int, required=True)
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max dense dimension")
    verify.add_argument("--out")
    verify.set_defaults(func=cmd_verify)

    bench_p = sub.add_parser("bench", help="time the pipeline over a sweep of depths")
    bench_p.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 20])
    bench_p.add_argument("--m", type=int, default=4)
    bench_p.add_argument("--count", type=int, default=16, help="number of superposed addresses")
    bench_p.add_argument("--reps", type=int, default=200)
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--backend", choices=("both", "auto", "compiled", "python"), default="both")
    bench_p.add_argument("--out")
    bench_p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"qwqram: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, ResourceError, ValueError) as exc:
        print(f"qwqram: error: {exc}", file=sys.stderr)
        return EXIT_SHAPE


if __name__ == "__main__":
    sys.exit(main())
