"""Command-line entry point: orbit, solve, laws, zieve and search subcommands."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .dynamics import DEFAULT_MAX_ITER, OrbitKind, QuadParam, classify
from .laws import ALL_LAWS, LawId, LawReport, run_laws
from .numbers import format_rational, parse_rational
from .search import EXIT_FPS, EXIT_LAW_FAIL, EXIT_OK, EXIT_USAGE, SearchConfig, law_summary_line, run_search, write_outputs
from .solver import solve
from .zieve import PrecisionError, parse_poly, period_mod, zieve_check


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, not argparse's default 2 (which means "law failure" here)
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    """``"2,6,10"`` or ranges ``"1:9"`` / ``"4:40:4"`` (inclusive), comma separated."""
    out: list[int] = []
    try:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if ":" in item:
                parts = [int(v) for v in item.split(":")]
                lo, hi = parts[0], parts[1]
                step = parts[2] if len(parts) > 2 else 1
                out.extend(range(lo, hi + 1, step))
            else:
                out.append(int(item))
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    return out


def _law_list(text: str) -> tuple[LawId, ...]:
    try:
        return tuple(LawId(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _exit_for(reports: Sequence[LawReport]) -> int:
    if any(r.failed and r.law_id is LawId.FPS_CONJECTURE for r in reports):
        return EXIT_FPS
    if any(r.failed for r in reports):
        return EXIT_LAW_FAIL
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace) -> int:
    res = classify(args.c, args.x, max_iter=args.max_iter)
    if args.json:
        print(json.dumps(res.to_dict(), sort_keys=True))
        return EXIT_OK
    print(f"c = {format_rational(args.c)}, x = {format_rational(args.x)}")
    print("trajectory: " + " -> ".join(format_rational(v) for v in res.trajectory))
    if res.kind is OrbitKind.WANDERING:
        print(f"wandering ({res.certificate.to_dict()['type'].replace('_', ' ')})")
    elif res.kind is OrbitKind.PERIODIC:
        print(f"periodic, period {res.period}")
    else:
        print(f"preperiodic, tail {res.tail}, period {res.period}")
    print("certificate: " + json.dumps(res.certificate.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    ps = solve(QuadParam.from_rational(args.c), max_iter=args.max_iter)
    reports = run_laws(ps, args.laws)
    if args.json:
        doc = {"periodic_set": ps.to_dict(), "laws": [r.to_dict() for r in reports]}
        print(json.dumps(doc, sort_keys=True))
        return _exit_for(reports)
    d = ps.d if ps.d is not None else "none"
    print(f"c = {format_rational(ps.c.c)}, d = {d}, s = {ps.s}")
    if ps.reason:
        print(f"reason: {ps.reason}")
    for cyc in ps.cycles:
        print(f"cycle of length {len(cyc)}: (" + ", ".join(format_rational(x) for x in cyc) + ")")
    print("Per = {" + ", ".join(format_rational(x) for x in ps.per) + "}")
    print("strictly preperiodic = {" + ", ".join(format_rational(x) for x in ps.preper) + "}")
    print(f"m_classes = {ps.m_classes}, preper_classes = {ps.preper_classes}")
    for r in reports:
        line = f"  {r.law_id.value:<20} {r.status.value}"
        if r.witness:
            line += "  " + json.dumps(r.witness, sort_keys=True)
        print(line)
    print("laws: " + law_summary_line(reports))
    return _exit_for(reports)


def cmd_laws(args: argparse.Namespace) -> int:
    ps = solve(QuadParam.from_rational(args.c), max_iter=args.max_iter)
    reports = run_laws(ps, args.laws)
    for r in reports:
        print(r.to_json())
    return _exit_for(reports)


def cmd_zieve(args: argparse.Namespace) -> int:
    g = parse_poly(args.poly, args.p, args.precision)
    n = args.n if args.n is not None else period_mod(g, args.alpha, args.precision)
    try:
        data = zieve_check(g, args.alpha, n, precision=args.precision)
    except PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(data.to_dict(), sort_keys=True))
    else:
        r = "inf" if data.r is None else data.r
        print(f"g = {g} over Z_{g.p}, alpha = {format_rational(args.alpha)}, precision {data.precision}")
        print(f"n = {data.n}, m = {data.m}, multiplier = {data.multiplier}, r = {r}")
        print("allowed = {" + ", ".join(map(str, data.allowed)) + "}")
        print("consistent" if data.consistent else "INCONSISTENT")
    return EXIT_OK if data.consistent else EXIT_LAW_FAIL


def cmd_search(args: argparse.Namespace) -> int:
    config = SearchConfig(
        d_values=tuple(args.d),
        a_min=args.a_min,
        a_max=args.a_max,
        laws=args.laws,
        jobs=args.jobs,
        seed=args.seed,
        max_iter=args.max_iter,
        four_only=args.four_only,
        s_max=args.s_max,
        output_path=args.out,
        fmt=args.format,
    )
    result = run_search(config)
    if args.out is None:
        sys.stdout.write(result.to_json() if args.format == "json" else result.to_csv())
    else:
        for path in write_outputs(result, args.out, args.format):
            print(f"wrote {path}", file=sys.stderr)
        print(json.dumps(result.summary, sort_keys=True, indent=1))
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadcycles", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("orbit", help="classify the orbit of x under x^2 - c")
    p.add_argument("--c", type=_rational, required=True)
    p.add_argument("--x", type=_rational, required=True)
    common(p)
    p.set_defaults(func=cmd_orbit)

    for name, func, text in (
        ("solve", cmd_solve, "compute Per and PrePer and audit every law"),
        ("laws", cmd_laws, "print law reports as newline-delimited JSON"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--c", type=_rational, required=True)
        p.add_argument("--laws", type=_law_list, default=ALL_LAWS)
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("zieve", help="period classification of a p-adic periodic point")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--poly", required=True, help='polynomial in t, e.g. "t^2+t-1"')
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--n", type=int, default=None, help="claimed period (default: period at the given precision)")
    p.add_argument("--precision", type=int, default=64)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_zieve)

    p = sub.add_parser("search", help="sweep c = a/d^2 over ranges of d and a")
    p.add_argument("--d", type=_int_list, required=True, help='e.g. "2,6,10" or "4:40:4"')
    p.add_argument("--a-min", type=int, default=-100)
    p.add_argument("--a-max", type=int, default=100)
    p.add_argument("--four-only", action="store_true", help="keep only d divisible by 4")
    p.add_argument("--s-max", type=int, default=None, help="keep only d with at most this many primes")
    p.add_argument("--laws", type=_law_list, default=ALL_LAWS)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
