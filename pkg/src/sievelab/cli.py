"""Command-line front door: one subcommand per operation.

Reports go to stdout as JSON (default) or CSV. Sieve tables are rebuilt
on demand or reused from --cache-dir when a file with the matching
window and version verifies its checksum; a corrupted file is rebuilt
with a warning and the run exits with status 4 to flag the recovery.

Exit codes: 0 success, 2 usage error, 3 resource budget exceeded,
4 cache corruption recovered.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import correlations, diagnostics, equidist, threshold
from .errors import CacheError, MemoryBudgetError
from .segments import DEFAULT_SEGMENT_SIZE
from .sieve import (
    DEFAULT_MEMORY_BUDGET,
    SIEVE_VERSION,
    build_table,
    load_table,
    save_table,
)
from .tuples import KTuple


def _count(text: str) -> int:
    """Parse a positive integer, allowing scientific notation like 1e6."""
    value = int(float(text))
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive count, got {text!r}")
    return value


def resolve_R(N: int, R: int | None, exponent: float | None) -> int:
    """Absolute R, or floor(N**exponent) when given as an exponent."""
    if (R is None) == (exponent is None):
        raise SystemExit2("exactly one of --R / --R-exponent is required")
    if R is not None:
        return R
    return max(1, int(math.floor(N**exponent * (1.0 + 1e-12))))


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _round15(obj):
    """Round every float to 15 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round15(v) for v in obj]
    return obj


def _emit_json(payload: dict) -> None:
    print(json.dumps(_round15(payload)))


def _fmt_cell(v):
    return f"{v:.15g}" if isinstance(v, float) else v


def _emit_csv(header, rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_cell(v) for v in row])


class TableProvider:
    """Builds sieve tables, round-tripping them through the cache dir."""

    def __init__(self, args):
        self.cache_dir = Path(args.cache_dir) if args.cache_dir else None
        self.threads = args.threads
        self.segment_size = args.segment_size
        self.memory_budget = args.memory_budget
        self.recovered_corruption = False

    def get(self, n0: int, length: int):
        path = None
        if self.cache_dir is not None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            path = self.cache_dir / f"sieve_{n0}_{length}_v{SIEVE_VERSION}.gpyt"
            if path.exists():
                try:
                    return load_table(path)
                except CacheError as exc:
                    print(f"warning: {exc}; rebuilding", file=sys.stderr)
                    self.recovered_corruption = True
        table = build_table(
            n0, length,
            segment_size=self.segment_size,
            threads=self.threads,
            memory_budget=self.memory_budget,
        )
        if path is not None:
            save_table(table, path)
        return table


def _emit_report(args, report) -> None:
    if args.format == "json":
        _emit_json(report.to_dict())
    else:
        _emit_csv(correlations.CSV_HEADER, [report.csv_row()])


def _cmd_sieve_build(args, tables: TableProvider) -> None:
    if args.cache_dir is None:
        raise SystemExit2("sieve-build requires --cache-dir")
    table = tables.get(args.n_start, args.n_length)
    payload = {
        "n0": table.n0,
        "length": table.length,
        "version": SIEVE_VERSION,
        "primes": int(table.isprime.sum()),
    }
    if args.format == "json":
        _emit_json(payload)
    else:
        _emit_csv(list(payload), [list(payload.values())])


def _lemma_args(args):
    H = KTuple.parse(args.tuple)
    R = resolve_R(args.N, args.R, args.R_exponent)
    return H, R


def _cmd_lemma1(args, tables):
    H, R = _lemma_args(args)
    table = tables.get(args.N, args.N + H.span)
    rep = correlations.lemma1_check(
        args.N, R, H, args.l1, args.l2, table,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit_report(args, rep)


def _cmd_lemma2(args, tables):
    H, R = _lemma_args(args)
    table = tables.get(args.N, args.N + H.span)
    rep = correlations.lemma2_check(
        args.N, R, H, args.l1, args.l2, args.h_index, table,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit_report(args, rep)


def _cmd_lemma3(args, tables):
    H, R = _lemma_args(args)
    table = tables.get(args.N, args.N + H.span)
    rep = correlations.lemma3_sum(
        args.N, R, H, args.l1, args.l2, args.sequence, table,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit_report(args, rep)


def _cmd_theorem1(args, tables):
    R = resolve_R(args.N, args.R, args.R_exponent)
    table = tables.get(args.N, args.N + args.h)
    rep = correlations.theorem1_report(
        args.N, R, args.h, table,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit_report(args, rep)


def _cmd_theorem2(args, tables):
    R = resolve_R(args.N, args.R, args.R_exponent)
    table = tables.get(args.N, args.N + args.h)
    rep = correlations.theorem2_report(
        args.N, R, args.h, args.u, table,
        segment_size=args.segment_size, threads=args.threads,
    )
    _emit_report(args, rep)


def _cmd_equidist(args, tables):
    kind = equidist.SequenceKind(args.kind, args.h)
    lo, hi = equidist.window_for(kind, args.N)
    table = tables.get(lo, hi - lo)
    report = equidist.level_sweep(
        kind, args.N, args.Q, table,
        threads=args.threads, time_budget=args.time_budget,
    )
    if args.format == "json":
        _emit_json(report.to_dict())
    else:
        rows, running = [], 0.0
        for q, e in report.rows:
            running += e
            rows.append([q, e, running])
        _emit_csv(["q", "E", "cumulative_total"], rows)


def _cmd_threshold(args, tables):
    result = threshold.optimize()
    if args.format == "json":
        _emit_json(result.to_dict())
    else:
        _emit_csv(["u", "theta_root"], [[u, t] for u, t in result.curve])


def _cmd_twin_count(args, tables):
    table = tables.get(1, args.N + args.h)
    rep = diagnostics.twin_count(args.N, args.h, table, method=args.method)
    if args.format == "json":
        _emit_json(rep.to_dict())
    else:
        d = rep.to_dict()
        _emit_csv(list(d), [list(d.values())])


def _cmd_chowla(args, tables):
    table = tables.get(1, args.x + args.h)
    value = diagnostics.chowla_sum(args.x, args.h, table)
    payload = {"x": args.x, "h": args.h, "sum": value,
               "normalized": value / args.x}
    if args.format == "json":
        _emit_json(payload)
    else:
        _emit_csv(list(payload), [list(payload.values())])


def _cmd_shifted_liouville(args, tables):
    table = tables.get(1, args.x + max(args.d_max, 2))
    rows = []
    ds = range(2, args.d_max + 1, 2) if args.d is None else [args.d]
    for d in ds:
        minus, plus = diagnostics.liouville_at_shifted_primes(args.x, d, table)
        rows.append({"x": args.x, "d": d, "count_minus": minus,
                     "count_plus": plus})
    if args.format == "json":
        _emit_json({"rows": rows})
    else:
        _emit_csv(["x", "d", "count_minus", "count_plus"],
                  [[r["x"], r["d"], r["count_minus"], r["count_plus"]]
                   for r in rows])


def _cmd_twin_ap(args, tables):
    table = tables.get(1, args.N + args.h)
    result = diagnostics.longest_twin_ap(args.N, args.h, table)
    payload = {"N": args.N, "h": args.h, "length": result.length,
               "first_term": result.first_term,
               "common_difference": result.common_difference}
    if args.format == "json":
        _emit_json(payload)
    else:
        _emit_csv(list(payload), [list(payload.values())])


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--segment-size", type=_count, default=DEFAULT_SEGMENT_SIZE)
    p.add_argument("--memory-budget", type=_count, default=DEFAULT_MEMORY_BUDGET)


def _add_R(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--R", type=_count, default=None)
    group.add_argument("--R-exponent", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sievelab",
        description="Sieve-weight correlation sums and distribution measurements",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sieve-build", help="build a sieve table into the cache")
    p.add_argument("--n-start", type=_count, required=True)
    p.add_argument("--n-length", type=_count, required=True)
    _add_common(p)
    p.set_defaults(fn=_cmd_sieve_build)

    for name, fn in (("lemma1", _cmd_lemma1), ("lemma2", _cmd_lemma2),
                     ("lemma3", _cmd_lemma3)):
        p = sub.add_parser(name, help=f"{name} correlation report")
        p.add_argument("--N", type=_count, required=True)
        _add_R(p)
        p.add_argument("--tuple", required=True, help='offsets, e.g. "0,2"')
        p.add_argument("--l1", type=int, default=0)
        p.add_argument("--l2", type=int, default=0)
        if name == "lemma2":
            p.add_argument("--h-index", type=int, default=-1,
                           help="which offset receives the prime weight")
        if name == "lemma3":
            p.add_argument("--sequence", required=True,
                           choices=correlations.LEMMA3_SELECTORS)
        _add_common(p)
        p.set_defaults(fn=fn)

    for name, fn in (("theorem1", _cmd_theorem1), ("theorem2", _cmd_theorem2)):
        p = sub.add_parser(name, help=f"{name} positivity margin report")
        p.add_argument("--N", type=_count, required=True)
        _add_R(p)
        p.add_argument("--h", type=int, default=2)
        if name == "theorem2":
            p.add_argument("--u", type=float, required=True)
        _add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("equidist", help="residue-class error sweep")
    p.add_argument("--kind", required=True, choices=equidist.SEQUENCE_TAGS)
    p.add_argument("--N", type=_count, required=True)
    p.add_argument("--Q", type=_count, required=True)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_equidist)

    p = sub.add_parser("threshold", help="mixing-parameter optimization")
    p.add_argument("action", nargs="?", default="optimize",
                   choices=("optimize",))
    _add_common(p)
    p.set_defaults(fn=_cmd_threshold)

    p = sub.add_parser("twin-count", help="prime pairs p, p+h up to N")
    p.add_argument("--N", type=_count, required=True)
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--method", choices=("bitmap", "intersection"),
                   default="bitmap")
    _add_common(p)
    p.set_defaults(fn=_cmd_twin_count)

    p = sub.add_parser("chowla", help="Liouville autocorrelation sum")
    p.add_argument("--x", type=_count, required=True)
    p.add_argument("--h", type=int, default=2)
    _add_common(p)
    p.set_defaults(fn=_cmd_chowla)

    p = sub.add_parser("shifted-liouville",
                       help="Liouville signs at shifted primes")
    p.add_argument("--x", type=_count, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--d-max", type=int, default=18,
                   help="sweep even shifts 2..d-max when --d is absent")
    _add_common(p)
    p.set_defaults(fn=_cmd_shifted_liouville)

    p = sub.add_parser("twin-ap", help="longest AP among twin starters")
    p.add_argument("--N", type=_count, required=True)
    p.add_argument("--h", type=int, default=2)
    _add_common(p)
    p.set_defaults(fn=_cmd_twin_ap)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tables = TableProvider(args)
    try:
        args.fn(args, tables)
    except MemoryBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 4 if tables.recovered_corruption else 0


if __name__ == "__main__":
    sys.exit(main())
