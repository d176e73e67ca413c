"""Command-line front end; every subcommand writes CSV.

Exit codes: 0 success, 2 malformed input or expression, 3 sequence too
short, 4 iteration limit reached, 5 non-finite map value, 6 root
extraction did not converge, 7 integration or pipeline failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Sequence

from . import expr as _expr
from .accel import RealSequence, SequenceTooShortError, aitken_delta2, iterated_aitken
from .fixpoint import FixedPointProblem, NonFiniteMapError, steffensen_solve
from .ivp import IntegrationError
from .lemaitre_ode import replicate_table, separatrix_trajectory
from .polyroots import NonConvergenceError, Polynomial, all_roots

EXIT_OK, EXIT_PARSE, EXIT_SHORT, EXIT_MAXIT, EXIT_NONFINITE, EXIT_NOCONV, EXIT_FAIL = (
    0, 2, 3, 4, 5, 6, 7)

# options whose values may legitimately start with '-'
_VALUE_OPTIONS = {"--coeffs", "--map", "--x0", "--x-star", "--rtol", "--atol"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(v: float) -> str:
    return f"{v:.12g}"


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return v


def read_values(stream) -> list[float]:
    """One real per line; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, line in enumerate(stream, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise CliError(f"line {lineno}: cannot parse {text!r} as a real", EXIT_PARSE) from None
        if not math.isfinite(v):
            raise CliError(f"line {lineno}: {text!r} is not finite", EXIT_PARSE)
        values.append(v)
    return values


def run_accelerate(args, out) -> int:
    if args.input == "-":
        values = read_values(sys.stdin)
    else:
        with open(args.input, encoding="utf-8") as fh:
            values = read_values(fh)
    k = args.depth
    if len(values) < max(2 * k + 1, 1):
        raise CliError(f"depth {k} needs {2 * k + 1} values, got {len(values)}", EXIT_SHORT)
    rows = iterated_aitken(RealSequence(values), k)
    flags = [set(aitken_delta2(rows[j - 1]).degenerate_indices) for j in range(1, k + 1)]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"row_{j}" for j in range(k + 1)] + [f"degenerate_{j}" for j in range(1, k + 1)])
    for n in range(len(values)):
        cells = [fmt(row[n]) if n < len(row) else "" for row in rows]
        cells += [("true" if n in flags[j - 1] else "false") if n < len(rows[j]) else ""
                  for j in range(1, k + 1)]
        writer.writerow(cells)
    return EXIT_OK


def _checked_map(func):
    def wrapped(x: float) -> float:
        try:
            y = func(x)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise NonFiniteMapError(f"map undefined at x={x!r}: {exc}") from None
        if isinstance(y, complex):
            raise NonFiniteMapError(f"map is complex at x={x!r}")
        return y
    return wrapped


def run_steffensen(args, out) -> int:
    try:
        func = _checked_map(_expr.parse_expression(args.map))
    except _expr.ExpressionError as exc:
        raise CliError(f"bad --map expression: {exc}", EXIT_PARSE) from None
    prob = FixedPointProblem(func)
    try:
        rep = steffensen_solve(prob, args.x0, atol=args.atol, rtol=args.rtol, maxit=args.max_iter)
    except NonFiniteMapError as exc:
        raise CliError(str(exc), EXIT_NONFINITE) from None
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["k", "x_k", "residual", "degenerate"])
    for k, x in enumerate(rep.trace):
        try:
            res = fmt(abs(prob(x) - x))
        except NonFiniteMapError:
            res = "nan"
        deg = "" if k == 0 else ("true" if rep.step_degenerate[k - 1] else "false")
        writer.writerow([k, fmt(x), res, deg])
    out.write(f"# converged={str(rep.converged).lower()} iterations={rep.iterations} "
              f"solution={fmt(rep.solution)} residual={fmt(rep.residual)}\n")
    return EXIT_OK if rep.converged else EXIT_MAXIT


def run_roots(args, out) -> int:
    try:
        coeffs = [float(c) for c in args.coeffs.split(",")]
        p = Polynomial(coeffs)
    except ValueError as exc:
        raise CliError(f"bad --coeffs: {exc}", EXIT_PARSE) from None
    try:
        roots = all_roots(p, args.n, accelerate=args.accelerate)
    except NonConvergenceError as exc:
        raise CliError(f"no convergence for m = {', '.join(map(str, exc.failed))}",
                       EXIT_NOCONV) from None
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", "root", "residual"])
    for rank, r in enumerate(roots, start=1):
        writer.writerow([rank, fmt(r.value), fmt(r.residual)])
    return EXIT_OK


def run_shoot(args, out) -> int:
    try:
        traj = separatrix_trajectory(args.x_star, rtol=args.rtol, atol=args.atol)
    except (IntegrationError, ValueError) as exc:
        raise CliError(f"shooting failed: {exc}", EXIT_FAIL) from None
    if args.trajectory:
        with open(args.trajectory, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "h_accepted"])
            w.writerow([fmt(traj.xs[0]), fmt(traj.ys[0]), ""])
            for x, y, h in zip(traj.xs[1:], traj.ys[1:], traj.steps):
                w.writerow([fmt(x), fmt(y), fmt(h)])
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x_star", "y0", "n_steps", "n_rejected"])
    writer.writerow([fmt(args.x_star), fmt(traj.y_final), traj.n_steps, traj.n_rejected])
    return EXIT_OK


def run_replicate(args, out) -> int:
    try:
        table = replicate_table(args.h, args.x_hi, args.series_order, sweeps=args.sweeps,
                                x_star=args.x_star)
    except (IntegrationError, ValueError, ArithmeticError) as exc:
        raise CliError(f"replication failed: {exc}", EXIT_FAIL) from None
    table.to_csv(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=["csv"], default="csv")

    parser = argparse.ArgumentParser(
        prog="ratiter",
        description="Aitken acceleration, Steffensen iteration, Hankel root extraction "
                    "and the rational-iteration treatment of y' = 2y^2(y-x).",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("accelerate", parents=[common],
                       help="iterated delta-squared table of a sequence")
    p.add_argument("input", nargs="?", default="-",
                   help="file with one real per line ('#' comments allowed); '-' for stdin")
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=run_accelerate)

    p = sub.add_parser("steffensen", parents=[common],
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="solve x = f(x) by Steffensen's method",
                       epilog="expression grammar:\n" + _expr.__doc__.split("::", 1)[1])
    p.add_argument("--map", required=True, help="expression in x, e.g. 'cos(x)'")
    p.add_argument("--x0", type=_real, default=0.0)
    p.add_argument("--atol", type=_positive_float, default=1e-14)
    p.add_argument("--rtol", type=_positive_float, default=0.0)
    p.add_argument("--max-iter", type=_positive_int, default=50)
    p.set_defaults(func=run_steffensen)

    p = sub.add_parser("roots", parents=[common],
                       help="all roots of a real polynomial with distinct root moduli")
    p.add_argument("--coeffs", required=True,
                   help="ascending coefficients b0,...,1 (comma separated)")
    p.add_argument("--n", type=_positive_int, default=60, help="series length")
    p.add_argument("--accelerate", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=run_roots)

    p = sub.add_parser("shoot", parents=[common],
                       help="y(0) of the separatrix by backward integration from (x*, x*)")
    p.add_argument("--x-star", type=_positive_float, default=10.0)
    p.add_argument("--rtol", type=_positive_float, default=1e-14)
    p.add_argument("--atol", type=_positive_float, default=1e-16)
    p.add_argument("--trajectory", help="also dump x, y, h_accepted to this CSV file")
    p.set_defaults(func=run_shoot)

    p = sub.add_parser("replicate", parents=[common],
                       help="rational-iteration table against the shooting reference")
    p.add_argument("--h", type=_positive_float, default=0.1)
    p.add_argument("--x-hi", type=_positive_float, default=3.0)
    p.add_argument("--series-order", type=_positive_int, default=6)
    p.add_argument("--sweeps", type=_positive_int, default=1)
    p.add_argument("--x-star", type=_positive_float, default=10.0)
    p.set_defaults(func=run_replicate)
    return parser


def _glue_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--coeffs -8,14`` into ``--coeffs=-8,14`` so argparse keeps it a value."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else argv))
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except CliError as exc:
        print(f"ratiter {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except SequenceTooShortError as exc:
        print(f"ratiter {args.command}: {exc}", file=sys.stderr)
        return EXIT_SHORT
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
