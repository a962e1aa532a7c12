"""Command-line front end.

Subcommands: compute, table, search-ap, thresholds, verify, asymptotics.
Only ``compute`` writes to the cache; the others read it.

Exit codes: 0 success or expectation met, 1 expectation failed, 2 usage
error, 3 cache or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import kernels
from .cache import (
    CACHE_ENV,
    CacheError,
    build_table,
    default_cache_dir,
    find_table,
    read_table,
    restrict,
)
from .experiments import (
    ap_table_order,
    asymptotic_ratio,
    histogram_grid,
    search_ap_congruences,
    threshold_scan,
)
from .partitions import PartitionTable
from .restricted import (
    verify_remark_crt,
    verify_remark_d_identity,
    verify_thm2_part1,
    verify_thm2_part2,
)

log = logging.getLogger("powerpart")

EXIT_OK = 0
EXIT_EXPECTATION = 1
EXIT_USAGE = 2
EXIT_CACHE = 3

STATEMENTS = ("thm2-part1", "thm2-part2", "remark-crt", "remark-D-identity")


class UsageError(Exception):
    pass


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _modulus(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"modulus must be at least 2, got {text}")
    return value


def _int_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    if not sep:
        return range(int(text), int(text) + 1)
    return range(int(lo), int(hi) + 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", type=Path, default=None,
                        help=f"table cache directory (default: ${CACHE_ENV} or ./powerpart-cache)")
    common.add_argument("--format", choices=("csv", "text"), default=None,
                        help="output format; each subcommand has its own default")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for scans")
    common.add_argument("-v", "--verbose", action="store_true")

    table_args = argparse.ArgumentParser(add_help=False)
    table_args.add_argument("--d", type=int, required=True, help="power d >= 1")
    table_args.add_argument("--N", type=_nonneg, required=True, help="truncation order")
    table_args.add_argument("--table", type=Path, default=None,
                            help="read this cache file instead of searching the cache directory")

    parser = argparse.ArgumentParser(
        prog="powerpart",
        description="Partitions into d-th powers: tables, congruences and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common, table_args],
                       help="build p_d(0..N) into the cache")
    p.add_argument("--mod", type=_modulus, default=None,
                   help="work mod m instead of in exact integers")
    p.add_argument("--checkpoint-every", type=float, default=300.0,
                   help="seconds between stage checkpoints (0 disables)")

    p = sub.add_parser("table", parents=[common, table_args],
                       help="residue counts for moduli 2..10 (CSV)")
    p.add_argument("--moduli", type=_int_range, default=range(2, 11), help="e.g. 2..10")
    p.add_argument("--align", action="store_true", help="pad columns for reading")

    p = sub.add_parser("search-ap", parents=[common, table_args],
                       help="look for p_d(an+b) = r mod m on arithmetic progressions")
    p.add_argument("--a", dest="a_range", type=_int_range, default=range(2, 1000),
                   help="range of a, e.g. 2..999")
    p.add_argument("--checks", type=int, default=101, help="n = 0..checks-1 are tested")
    p.add_argument("--moduli", type=_int_range, default=range(2, 14), help="e.g. 2..13")
    p.add_argument("--expect-empty", action="store_true",
                   help="exit 1 if any candidate is found")

    p = sub.add_parser("thresholds", parents=[common, table_args],
                       help="last violation of the convexity / log-concavity bounds")
    p.add_argument("--kind", choices=("convex", "logconcave", "both"), default="both")
    p.add_argument("--expect-holds-from", type=int, default=None,
                   help="exit 1 unless every requested scan reports this value")

    p = sub.add_parser("verify", parents=[common], help="check the restricted-partition congruences")
    p.add_argument("statement", choices=STATEMENTS)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p1", type=int, default=None)
    p.add_argument("--p2", type=int, required=True)
    p.add_argument("--N", type=_nonneg, required=True)

    p = sub.add_parser("asymptotics", parents=[common, table_args],
                       help="log p_d(n) against the Wright growth rate")
    p.add_argument("--points", type=int, nargs="*", default=None,
                   help="sample indices (default: powers of ten up to N)")
    return parser


def _cache_dir(args) -> Path:
    return args.cache_dir if args.cache_dir is not None else default_cache_dir()


def _load(args, modulus: int | None = None, order: int | None = None) -> PartitionTable:
    """Load a cached table able to serve (d, order) mod ``modulus`` (exact if None)."""
    order = args.N if order is None else order
    if args.table is not None:
        table = read_table(args.table)
    else:
        path = find_table(_cache_dir(args), args.d, order, modulus)
        if path is None:
            hint = f"powerpart compute --d {args.d} --N {order}"
            if modulus is not None:
                hint += f" --mod {modulus}"
            raise CacheError(f"no cached table for d={args.d} with N >= {order}; run: {hint}")
        table = read_table(path)
    if table.d != args.d:
        raise UsageError(f"table has d={table.d}, requested d={args.d}")
    if table.order < order:
        raise UsageError(f"table order {table.order} is below the requested {order}")
    if modulus is None and not table.is_exact:
        raise UsageError("this command needs an exact table")
    if modulus is not None and table.ring.modulus is not None and table.ring.modulus % modulus:
        raise UsageError(f"table is stored mod {table.ring.modulus}, not a multiple of {modulus}")
    return restrict(table, order, None)


def cmd_compute(args, out) -> int:
    if args.d < 1:
        raise UsageError("--d must be at least 1")
    every = args.checkpoint_every if args.checkpoint_every > 0 else None
    result = build_table(_cache_dir(args), args.d, args.N, args.mod,
                         checkpoint_every=every, load=False)
    ring = "exact" if args.mod is None else f"mod{args.mod}"
    print(f"d={args.d} N={args.N} ring={ring} status={result.status} "
          f"path={result.path.name} sha256={result.checksum}", file=out)
    log.info("%s in %.2fs (%d stages, %s kernels)", result.status, result.seconds,
             result.stages, kernels.IMPLEMENTATION)
    return EXIT_OK


def cmd_table(args, out) -> int:
    moduli = list(args.moduli)
    if not moduli or moduli[0] < 2:
        raise UsageError("moduli must be at least 2")
    table = _load(args, modulus=math.lcm(*moduli))
    grid = histogram_grid(table, moduli)
    width = max(moduli)
    if args.format == "text":
        for h in grid:
            for r, c in enumerate(h.counts):
                print(f"d={h.d} N={h.order} m={h.modulus} r={r} count={c}", file=out)
        return EXIT_OK
    rows = [["m"] + [f"r{r}" for r in range(width)]]
    rows += [[str(h.modulus)] + [str(c) for c in h.counts] for h in grid]
    if args.align:
        cols = max(len(r) for r in rows)
        widths = [max(len(r[i]) for r in rows if i < len(r)) for i in range(cols)]
        for r in rows:
            print(" ".join(cell.rjust(w) for cell, w in zip(r, widths)), file=out)
        return EXIT_OK
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    out.write(buf.getvalue())
    return EXIT_OK


def cmd_search_ap(args, out) -> int:
    moduli = list(args.moduli)
    a_values = list(args.a_range)
    if not moduli or moduli[0] < 2:
        raise UsageError("moduli must be at least 2")
    if not a_values or a_values[0] < 2:
        raise UsageError("a must be at least 2")
    need = ap_table_order(max(a_values), args.checks)
    table = _load(args, modulus=math.lcm(*moduli), order=need)
    found = search_ap_congruences(table, a_values, args.checks, moduli, jobs=args.jobs)
    if args.format == "csv":
        print("d,m,r,a,b,checked", file=out)
        for c in found:
            print(f"{c.d},{c.m},{c.r},{c.a},{c.b},{c.checked}", file=out)
    else:
        for c in found:
            print(f"d={c.d} m={c.m} r={c.r} a={c.a} b={c.b} checked={c.checked}", file=out)
        print(f"d={table.d} a={a_values[0]}..{a_values[-1]} checks={args.checks} "
              f"moduli={moduli[0]}..{moduli[-1]} table_N={table.order} candidates={len(found)}",
              file=out)
    if args.expect_empty and found:
        return EXIT_EXPECTATION
    return EXIT_OK


def cmd_thresholds(args, out) -> int:
    table = _load(args)
    kinds = ("convex", "logconcave") if args.kind == "both" else (args.kind,)
    status = EXIT_OK
    for kind in kinds:
        report = threshold_scan(table, kind, jobs=args.jobs)
        if args.format == "csv":
            last = "" if report.last_violation is None else report.last_violation
            print(f"{report.d},{kind},{report.scan_bound},{last},{report.holds_from},"
                  f"{report.violations}", file=out)
        else:
            print(report.to_line(), file=out)
        if args.expect_holds_from is not None and report.holds_from != args.expect_holds_from:
            status = EXIT_EXPECTATION
    return status


def cmd_verify(args, out) -> int:
    try:
        if args.statement == "thm2-part1":
            if args.p1 not in (None, 2):
                raise UsageError("thm2-part1 fixes p1 = 2")
            report = verify_thm2_part1(args.d, args.p2, args.N)
        elif args.statement == "thm2-part2":
            if args.p1 is None:
                raise UsageError("thm2-part2 needs --p1")
            report = verify_thm2_part2(args.d, args.p1, args.p2, args.N)
        elif args.statement == "remark-crt":
            if args.p1 is None:
                raise UsageError("remark-crt needs --p1")
            report = verify_remark_crt(args.d, args.p1, args.p2, args.N)
        else:
            report = verify_remark_d_identity(args.d, args.p2, args.N)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(report.to_line(), file=out)
    return EXIT_OK if report.ok else EXIT_EXPECTATION


def cmd_asymptotics(args, out) -> int:
    table = _load(args)
    points = args.points
    if not points:
        points = [10**k for k in range(1, len(str(max(table.order, 1)))) if 10**k <= table.order]
    rows = asymptotic_ratio(table, points)
    if args.format == "csv":
        print("n,ratio", file=out)
    for n, ratio in rows:
        print(f"{n},{ratio:.12g}" if args.format == "csv" else f"d={table.d} n={n} ratio={ratio:.12g}",
              file=out)
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "table": cmd_table,
    "search-ap": cmd_search_ap,
    "thresholds": cmd_thresholds,
    "verify": cmd_verify,
    "asymptotics": cmd_asymptotics,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.format is None:
        args.format = "csv" if args.command == "table" else "text"
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"powerpart {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheError, OSError) as exc:
        print(f"powerpart {args.command}: {exc}", file=sys.stderr)
        return EXIT_CACHE


if __name__ == "__main__":
    sys.exit(main())
