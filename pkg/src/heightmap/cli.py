"""Command line front end: ``heightmap reduce|check|bench|gen|loglik``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from .errors import BoxValidationError, HeightMapError, OracleSizeError, ParseError
from .geometry import canonicalize, map_back
from .io import (
    read_alpha,
    read_clique_matrix,
    read_dataset,
    write_canonical,
    write_clique_dense,
    write_clique_supports,
    write_dataset,
)
from .npmle import clique_matrix, log_likelihood
from .oracle import oracle_reduce
from .reduction import attach_real, reduce_canonical
from .simbench import (
    ALGORITHMS,
    DEFAULT_SIZES,
    DEFAULT_BUDGET,
    fit_loglog_slope,
    gen_current_status,
    run_benchmark,
    summarize,
    write_records_csv,
    write_summary_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_ORACLE_SIZE = 5
EXIT_MISMATCH = 6

log = logging.getLogger("heightmap")


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_reduce(args) -> int:
    data = read_dataset(args.input, dim=args.dim)
    cb, cmap = canonicalize(data)
    want_cliques = bool(args.cliques or args.dense_csv)
    found = reduce_canonical(cb, cliques=want_cliques)
    header = f"maximal intersections of {args.input}: m={len(found)}"
    with _output(args.output) as fh:
        if args.canonical:
            write_canonical(found, fh, cb.d, comment=header)
        else:
            write_dataset([map_back(a, cmap) for a in found], fh, cb.d, comment=header)
    if args.cliques:
        with _output(args.cliques) as fh:
            write_clique_supports([a.clique for a in found], cb.n, fh)
    if args.dense_csv:
        with _output(args.dense_csv) as fh:
            write_clique_dense(clique_matrix(found, cb, check=False), fh)
    return EXIT_OK


def _first_diff(expected, actual, label_a, label_b):
    missing = sorted(set(expected) - set(actual))
    extra = sorted(set(actual) - set(expected))
    lines = []
    if missing:
        lines.append(f"in {label_a} only: {missing[0]}  ({len(missing)} total)")
    if extra:
        lines.append(f"in {label_b} only: {extra[0]}  ({len(extra)} total)")
    return lines


def cmd_check(args) -> int:
    data = read_dataset(args.input, dim=args.dim)
    cb, cmap = canonicalize(data)
    reference = oracle_reduce(cb)
    found = reduce_canonical(cb)
    diffs = _first_diff([a.key() for a in reference], [a.key() for a in found], "oracle", "sweep")
    if args.expected:
        exp = read_dataset(args.expected, dim=cb.d)
        if exp.canonical:
            want = [(a.lo, a.hi) for a in reference]
            got = [tuple(zip(*[(int(lo), int(hi)) for lo, _, hi, _ in b.intervals()])) for b in exp]
        else:
            want = [b.point_set() for b in (a.real for a in attach_real(reference, cmap))]
            got = [b.point_set() for b in exp]
        diffs += _first_diff(want, got, "oracle", args.expected)
    if diffs:
        print("MISMATCH")
        for line in diffs:
            print("  " + line)
        return EXIT_MISMATCH
    print(f"EQUAL m={len(reference)}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args) -> int:
    records = run_benchmark(args.sizes, args.reps, algorithm=args.algorithm, seed=args.seed,
                            budget=args.budget, d=args.dim)
    with _output(args.output) as fh:
        write_records_csv(records, fh)
    if args.summary:
        with _output(args.summary) as fh:
            write_summary_csv(records, fh)
    report = sys.stderr if args.output in (None, "-") else sys.stdout
    for row in summarize(records):
        print(f"n={row['n']:>6}  reps={row['reps']:>3}  mean={row['mean']:.6g}s  sd={row['sd']:.3g}s",
              file=report)
    try:
        slope = fit_loglog_slope(records, args.klast)
    except ValueError as exc:
        print(f"slope: not available ({exc})", file=report)
    else:
        print(f"slope={slope:.3f} (last {args.klast} sizes)", file=report)
    return EXIT_OK


def cmd_gen(args) -> int:
    boxes = gen_current_status(args.n, args.seed)
    with _output(args.output) as fh:
        write_dataset(boxes, fh, 2, comment=f"bivariate current status data, n={args.n}, seed={args.seed}")
    return EXIT_OK


def cmd_loglik(args) -> int:
    cm = read_clique_matrix(args.cliques)
    alpha = read_alpha(args.alpha)
    print(repr(log_likelihood(cm, alpha)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heightmap",
                                description="Maximal intersections of observation boxes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="compute maximal intersections of a dataset")
    r.add_argument("input")
    r.add_argument("-o", "--output", help="output file (default stdout)")
    r.add_argument("--dim", type=int, help="dimension, if the file has no header")
    r.add_argument("--canonical", action="store_true", help="write canonical coordinates")
    r.add_argument("--cliques", metavar="PATH", help="write the clique matrix as row supports")
    r.add_argument("--dense-csv", metavar="PATH", help="write the clique matrix as dense 0/1 CSV")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("check", aliases=["oracle-check"], help="compare the sweep against the brute-force oracle")
    c.add_argument("input")
    c.add_argument("--dim", type=int)
    c.add_argument("--expected", metavar="PATH", help="reduce output to compare against the oracle too")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="time the reduction on simulated data")
    b.add_argument("--sizes", type=_int_list, default=list(DEFAULT_SIZES))
    b.add_argument("--reps", type=int, default=50)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--klast", type=int, default=4)
    b.add_argument("--algorithm", choices=ALGORITHMS, default="heightmap")
    b.add_argument("--dim", type=int, default=2)
    b.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="seconds per size")
    b.add_argument("-o", "--output", help="timing CSV (default stdout)")
    b.add_argument("--summary", metavar="PATH", help="per-size mean/sd CSV")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write a simulated current-status dataset")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    ll = sub.add_parser("loglik", help="evaluate the log likelihood of masses")
    ll.add_argument("cliques", help="clique matrix (row supports or dense CSV)")
    ll.add_argument("alpha", help="masses, one per maximal intersection")
    ll.set_defaults(func=cmd_loglik)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OracleSizeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_ORACLE_SIZE
    except (BoxValidationError, HeightMapError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
