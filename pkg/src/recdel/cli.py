"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 when a ``verify`` or
``compare`` check fails.  Tables go to stdout (or ``--out``), diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from recdel import asymptotics, equiprob, exact, process, series

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return fmt(x)
    return x


def parse_p(text: str, mode: str | None) -> process.ProcessParams:
    """Fractions stay exact; decimals are exact only if ``mode`` asks or they are dyadic."""
    try:
        if "/" in text:
            p = Fraction(text)
        else:
            value = float(text)
            dec = Fraction(text)
            p = dec if mode == exact.RATIONAL or (mode is None and Fraction(value) == dec) else value
        params = process.ProcessParams(p)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--p: cannot parse {text!r} as a probability") from None
    if not 0 < params.p < 1:
        raise UsageError(f"--p must lie strictly between 0 and 1, got {text}")
    return params


def _nonneg(flag: str, value: int) -> int:
    if value < 0:
        raise UsageError(f"{flag} must be >= 0, got {value}")
    return value


def _grid(text: str) -> list[int]:
    try:
        grid = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--grid: expected comma-separated integers, got {text!r}") from None
    if not grid or min(grid) < 1:
        raise UsageError("--grid needs at least one n >= 1")
    return grid


def _rule(name: str) -> process.DeletionRule:
    try:
        return process.get_rule(name)
    except ValueError as err:
        raise UsageError(f"--rule: {err}") from None


def _emit_table(header: list[str], rows: list[list], args) -> str:
    if args.format == "json":
        return json.dumps([{h: _jsonable(v) for h, v in zip(header, r)} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt(v) for v in r])
    return buf.getvalue()


def cmd_simulate(args):
    params = parse_p(args.p, exact.FLOAT)
    n = _nonneg("--n", args.n)
    if args.reps < 1:
        raise UsageError(f"--reps must be >= 1, got {args.reps}")
    functionals = args.functional or list(process.FUNCTIONALS)
    bad = set(functionals) - set(process.FUNCTIONALS)
    if bad:
        raise UsageError(f"--functional: unknown {sorted(bad)}")
    res = process.monte_carlo(n, params, _rule(args.rule), args.reps, args.seed,
                              functionals, threads=args.threads)
    header = ["functional", "n", "reps", "mean", "variance", "stderr"]
    rows = [[f, n, s.reps, s.mean, s.variance, s.stderr] for f, s in res.items()]
    return _emit_table(header, rows, args), EXIT_OK


def cmd_exact(args):
    params = parse_p(args.p, args.mode)
    n = _nonneg("--n", args.n)
    mode = exact.resolve_mode(params, args.mode)
    header = exact.MomentTable.field_names()
    rows = [[getattr(m, h) for h in header] for m in exact.moment_rows(n, params, mode)]
    if not args.all:
        rows = rows[-1:]
    return _emit_table(header, rows, args), EXIT_OK


def cmd_series(args):
    params = parse_p(args.p, args.mode)
    N = _nonneg("--N", args.N)
    if args.name not in series.GF_NAMES:
        raise UsageError(f"--name must be one of {list(series.GF_NAMES)}")
    ps = series.series_gf(args.name, params, N, exact.resolve_mode(params, args.mode))
    return _emit_table(["n", "coefficient"], [[i, c] for i, c in enumerate(ps)], args), EXIT_OK


def cmd_asym(args):
    params = parse_p(args.p, None)
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    names = args.functional or list(asymptotics.ASYM_FUNCTIONALS)
    rows = []
    for name in names:
        if name not in asymptotics.ASYM_FUNCTIONALS:
            raise UsageError(f"--functional: unknown {name!r}")
        e = asymptotics.asym_estimate(name, params, args.n, refined=args.refined)
        rows.append([e.functional, e.regime, args.n, e.value, e.error_order])
    return _emit_table(["functional", "regime", "n", "value", "error_order"], rows, args), EXIT_OK


def cmd_compare(args):
    params = parse_p(args.p, None)
    if args.functional not in asymptotics.ASYM_FUNCTIONALS:
        raise UsageError(f"--functional: unknown {args.functional!r}")
    table = asymptotics.convergence_table(args.functional, params, _grid(args.grid), refined=args.refined)
    rows = [[r.n, r.exact, r.asymptotic, r.difference] for r in table]
    status = EXIT_OK
    if args.tol is not None and table[-1].difference > args.tol:
        print(f"compare: |exact - asymptotic| = {table[-1].difference:.3g} at n={table[-1].n} "
              f"exceeds --tol {args.tol}", file=sys.stderr)
        status = EXIT_CHECK
    return _emit_table(["n", "exact", "asymptotic", "difference"], rows, args), status


def cmd_verify(args):
    params = parse_p(args.p, exact.RATIONAL)
    K = _nonneg("--K", args.K)
    n = _nonneg("--n", args.n)
    if max(K, n) > args.cap:
        raise UsageError(f"--K/--n: strata above {args.cap} are too large to enumerate")
    report = equiprob.verification_report(_rule(args.rule), params, K, n)
    status = EXIT_OK if report["columns_equal"] and report["uniform"] else EXIT_CHECK
    return json.dumps(_jsonable(report), indent=2) + "\n", status


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recdel", description="Random recursive trees with insertions and deletions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="csv"):
        sp.add_argument("--p", required=True, help="insertion probability, e.g. 3/10 or 0.3")
        sp.add_argument("--format", choices=["csv", "json"], default=fmt_default)
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("simulate", help="Monte Carlo means of tree functionals")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rule", default="lifo")
    sp.add_argument("--functional", action="append")
    sp.add_argument("--threads", type=int, help=f"worker threads (default ${process.THREADS_ENV} or 1)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("exact", help="exact moments at time n")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=exact.MODES)
    sp.add_argument("--all", action="store_true", help="emit every row 0..n")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("series", help="generating-function coefficients")
    common(sp)
    sp.add_argument("--name", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--mode", choices=exact.MODES)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("asym", help="asymptotic estimates")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--functional", action="append")
    sp.add_argument("--refined", action="store_true")
    sp.set_defaults(func=cmd_asym)

    sp = sub.add_parser("compare", help="exact vs asymptotic over an n grid")
    common(sp)
    sp.add_argument("--functional", required=True)
    sp.add_argument("--grid", required=True, help="comma-separated n values")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--refined", action="store_true")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="brute-force equiprobability check")
    sp.add_argument("--p", default="1/2")
    sp.add_argument("--rule", default="lifo")
    sp.add_argument("--K", type=int, default=5)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--cap", type=int, default=8)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify, format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, status = args.func(args)
    except UsageError as err:
        print(f"recdel: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
