"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 an internal invariant was violated (a defect, not bad input).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import MillsError
from .exact import format_poly
from .laplace import coeff_table, laplace_P, laplace_Q
from .numeric import (
    asymptotic_partial_sum,
    bracket,
    cf_convergent,
    digits_to_bits,
    mills_ratio,
    t_grid,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3

TABLE_FAMILY = {"p": "P", "q": "Q", "beta": "BETA"}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    k_max: int = 8
    t_points: tuple[Fraction, ...] = ()
    depths: tuple[int, ...] = (1,)
    precision_digits: int = 30
    output_format: str = "text"
    output_path: str | None = None

    def __post_init__(self):
        if self.precision_digits < 20:
            raise UsageError("--digits must be >= 20")
        if self.k_max < 0:
            raise UsageError("--k-max must be nonnegative")
        if any(d < 1 for d in self.depths):
            raise UsageError("depths must be >= 1")


# ---------------------------------------------------------------------------
# serialization


def rational_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def rational_json(x: Fraction) -> dict:
    return {"rational": {"num": str(x.numerator), "den": str(x.denominator)}}


def decimal_str(x: Fraction, digits: int) -> str:
    """Decimal rendering of an exact rational to ``digits`` significant digits."""
    import mpmath

    with mpmath.workdps(digits + 10):
        v = mpmath.mpf(x.numerator) / x.denominator
        return mpmath.nstr(v, digits, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def render(columns: list[str], rows: list[dict], fmt: str, meta: dict) -> str:
    """Fraction cells become tagged rationals in JSON and ``num/den`` in CSV.

    Callers pass big integers as decimal strings so JSON consumers never see a
    lossy number.
    """
    if fmt == "json":
        def cell(v):
            return rational_json(v) if isinstance(v, Fraction) else v

        doc = dict(meta)
        doc["columns"] = columns
        doc["rows"] = [{c: cell(r[c]) for c in columns} for r in rows]
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([rational_str(v) if isinstance(v, Fraction) else v for v in (r[c] for c in columns)])
    return buf.getvalue()


def parse_rational_cell(s: str) -> Fraction:
    return Fraction(s)


# ---------------------------------------------------------------------------
# commands


def table_text(which: str, k_max: int) -> str:
    lines = []
    if which == "laplace":
        for k in range(1, k_max + 1):
            lines.append(f"P_{k} = {format_poly(laplace_P(k))}; Q_{k - 1} = {format_poly(laplace_Q(k - 1))}")
    else:
        tab = coeff_table(TABLE_FAMILY[which])
        for k in range(k_max + 1):
            lines.append(f"k={k}: " + ", ".join(str(tab.entry(k, m)) for m in range(k_max + 1)))
    return "\n".join(lines) + "\n"


def cmd_table(which: str, k_max: int, fmt: str = "text") -> str:
    if which not in ("laplace", *TABLE_FAMILY):
        raise UsageError(f"unknown table {which!r}")
    if k_max < 0:
        raise UsageError("--k-max must be nonnegative")
    if fmt == "text":
        return table_text(which, k_max)
    if which == "laplace":
        cols = ["k", "P_k", "Q_k_minus_1"]
        rows = [
            {"k": k, "P_k": format_poly(laplace_P(k)), "Q_k_minus_1": format_poly(laplace_Q(k - 1))}
            for k in range(1, k_max + 1)
        ]
    else:
        tab = coeff_table(TABLE_FAMILY[which])
        cols = ["k"] + [f"m{m}" for m in range(k_max + 1)]
        rows = [{"k": k, **{f"m{m}": str(tab.entry(k, m)) for m in range(k_max + 1)}} for k in range(k_max + 1)]
    return render(cols, rows, fmt, {"command": "table", "table": which, "k_max": k_max})


BOUND_COLUMNS = ["t", "depth", "lower", "lower_decimal", "upper", "upper_decimal", "R", "width"]


def bound_rows(points, depths, digits: int) -> list[dict]:
    if not points:
        raise UsageError("empty t grid")
    if any(t <= 0 for t in points):
        raise UsageError("all grid points must be > 0")
    prec = digits_to_bits(digits)
    rows = []
    for t in sorted(set(points)):
        r = mills_ratio(t, prec)
        for j in sorted(set(depths)):
            b = bracket(t, j)
            if not (b.lower < r.lower and r.upper < b.upper):
                raise InvariantViolation(f"bracket does not contain R at t={t}, depth={j}")
            rows.append(
                {
                    "t": t,
                    "depth": j,
                    "lower": b.lower,
                    "lower_decimal": decimal_str(b.lower, digits),
                    "upper": b.upper,
                    "upper_decimal": decimal_str(b.upper, digits),
                    "R": r.decimal(digits),
                    "width": decimal_str(b.width, digits),
                }
            )
    return rows


def cmd_bound(points, depths, digits: int, fmt: str = "csv") -> str:
    rows = bound_rows(points, depths, digits)
    return render(BOUND_COLUMNS, rows, fmt, {"command": "bound", "digits": digits})


def _position(x: Fraction, r) -> str:
    if x < r.lower:
        return "below"
    if x > r.upper:
        return "above"
    return "unresolved"


CF_COLUMNS = ["k", "convergent", "decimal", "position", "expected"]


def cmd_cf(t: Fraction, k_max: int, digits: int, fmt: str = "csv") -> str:
    if t <= 0:
        raise UsageError("t must be > 0")
    if k_max < 1:
        raise UsageError("--k-max must be >= 1")
    r = mills_ratio(t, digits_to_bits(digits))
    rows = []
    for k in range(1, k_max + 1):
        c = cf_convergent(k, t)
        pos = _position(c, r)
        expected = "below" if k % 2 == 0 else "above"
        if pos != expected:
            raise InvariantViolation(f"convergent {k} at t={t} is {pos} R, expected {expected}")
        rows.append({"k": k, "convergent": c, "decimal": decimal_str(c, digits), "position": pos, "expected": expected})
    return render(CF_COLUMNS, rows, fmt, {"command": "cf", "t": rational_str(t), "R": r.decimal(digits)})


ASYM_COLUMNS = ["j", "partial_sum", "decimal", "position", "within_next_term"]


def cmd_asym(t: Fraction, j_max: int, digits: int, fmt: str = "csv") -> str:
    if t <= 0:
        raise UsageError("t must be > 0")
    if j_max < 0:
        raise UsageError("--j-max must be >= 0")
    r = mills_ratio(t, digits_to_bits(digits))
    rows = []
    odd = 1
    for j in range(j_max + 1):
        odd *= 2 * j + 1
        s = asymptotic_partial_sum(t, j)
        bound = odd / t ** (2 * j + 3)
        within = max(abs(r.upper - s), abs(r.lower - s)) <= bound
        rows.append(
            {
                "j": j,
                "partial_sum": s,
                "decimal": decimal_str(s, digits),
                "position": _position(s, r),
                "within_next_term": "yes" if within else "no",
            }
        )
    return render(ASYM_COLUMNS, rows, fmt, {"command": "asym", "t": rational_str(t), "R": r.decimal(digits)})


def cmd_verify(suite: str, out) -> int:
    from .verify import run_suite

    reports = run_suite(suite)
    for rep in reports:
        print(rep.line(), file=out)
    failed = [r for r in reports if not r.verified]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks verified", file=out)
    return EXIT_OK if not failed else EXIT_FAILED


# ---------------------------------------------------------------------------
# argument handling


def _rational_arg(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _depths_arg(s: str) -> tuple[int, ...]:
    try:
        if "-" in s:
            a, b = (int(x) for x in s.split("-", 1))
            if a > b:
                raise ValueError
            return tuple(range(a, b + 1))
        return (int(s),)
    except ValueError:
        raise argparse.ArgumentTypeError(f"depth must be N or A-B, got {s!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_output(p, formats=("csv", "json"), default="csv"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")


def _add_grid(p):
    p.add_argument("--t", dest="t_values", type=_rational_arg, action="append", default=[], metavar="T",
                   help="explicit evaluation point (repeatable)")
    p.add_argument("--t-start", type=_rational_arg)
    p.add_argument("--t-stop", type=_rational_arg)
    p.add_argument("--t-count", type=int)
    p.add_argument("--t-spacing", choices=("linear", "log"), default="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="millsratio", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table", help="print Laplace polynomials or a coefficient matrix")
    p.add_argument("which", choices=("laplace", "p", "q", "beta"))
    p.add_argument("--k-max", type=int, default=8)
    _add_output(p, ("text", "csv", "json"), "text")

    p = sub.add_parser("bound", help="certified rational brackets for R(t)")
    _add_grid(p)
    p.add_argument("--depth", type=_depths_arg, default=(1,), help="N or range A-B")
    p.add_argument("--digits", type=int, default=30)
    _add_output(p)

    p = sub.add_parser("cf", help="continued-fraction convergents")
    p.add_argument("--t", dest="t", type=_rational_arg, required=True)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--digits", type=int, default=30)
    _add_output(p)

    p = sub.add_parser("asym", help="partial sums of the asymptotic series")
    p.add_argument("--t", dest="t", type=_rational_arg, required=True)
    p.add_argument("--j-max", type=int, default=5)
    p.add_argument("--digits", type=int, default=30)
    _add_output(p)

    p = sub.add_parser("verify", help="run identity and invariant checks")
    p.add_argument("suite", nargs="?", default="all", choices=("all", "identities", "polynomials", "numeric"))
    return parser


def _grid_from_args(a) -> tuple[Fraction, ...]:
    pts = list(a.t_values)
    grid_args = (a.t_start, a.t_stop, a.t_count)
    if any(v is not None for v in grid_args):
        if a.t_start is None or a.t_count is None:
            raise UsageError("--t-start and --t-count are required for a grid")
        if a.t_count < 1:
            raise UsageError("--t-count must be >= 1")
        stop = a.t_stop if a.t_stop is not None else a.t_start
        try:
            pts += t_grid(a.t_start, stop, a.t_count, a.t_spacing)
        except MillsError as e:
            raise UsageError(str(e)) from None
    return tuple(pts)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, sys.stdout)
        if args.command == "table":
            cfg = RunConfig("table", k_max=args.k_max, output_format=args.format, output_path=args.out)
            _emit(cmd_table(args.which, cfg.k_max, cfg.output_format), cfg.output_path)
        elif args.command == "bound":
            cfg = RunConfig("bound", t_points=_grid_from_args(args), depths=args.depth,
                            precision_digits=args.digits, output_format=args.format, output_path=args.out)
            _emit(cmd_bound(cfg.t_points, cfg.depths, cfg.precision_digits, cfg.output_format), cfg.output_path)
        elif args.command == "cf":
            cfg = RunConfig("cf", k_max=max(args.k_max, 0), precision_digits=args.digits, output_format=args.format)
            _emit(cmd_cf(args.t, args.k_max, cfg.precision_digits, args.format), args.out)
        elif args.command == "asym":
            cfg = RunConfig("asym", precision_digits=args.digits, output_format=args.format)
            _emit(cmd_asym(args.t, args.j_max, cfg.precision_digits, args.format), args.out)
    except UsageError as e:
        print(f"millsratio: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as e:
        print(f"millsratio: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
