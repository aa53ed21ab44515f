"""Command-line interface: ``simplexvol {integrate,volume,sweep,rule}``.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 numerical failure, 5 input file not found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import cubature, exact, relaxations
from .errors import (
    DegenerateSimplexError,
    DivergentIntegralError,
    DomainError,
    ExactModeError,
    NumericalFailure,
    PreconditionError,
    SpecParseError,
)
from .functions import ExpAffine, LinPow, parse_function_spec
from .geometry import (
    Simplex,
    interval,
    load_simplex_json,
    scaled_simplex,
    shifted_simplex,
    simplex_volume,
    standard_simplex,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERIC = 4
EXIT_NOT_FOUND = 5

POLY_METHODS = ("pullback", "taylor_expansion", "linform_decomp")
AFFINE_POWER_METHODS = ("brion", "residue", "series")
EXP_METHODS = ("brion", "equal_difference", "series", "divided_difference")
NUMERIC_METHODS = ("conical", "gm", "monte_carlo")


class _ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so ``run`` controls the exit code."""

    def error(self, message):
        raise SpecParseError(message)


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _number(token: str) -> Fraction:
    try:
        return Fraction(token.strip())
    except (ValueError, ZeroDivisionError):
        raise SpecParseError("not a number", token) from None


def _int(token: str) -> int:
    value = _number(token)
    if value.denominator != 1:
        raise SpecParseError("expected an integer", token)
    return int(value)


def parse_simplex(text: str) -> Simplex:
    """Shorthands ``std:d``, ``scaled:d,u``, ``shifted:d,u,v0...``, ``interval:l,u``, ``file:path``."""
    kind, sep, body = text.partition(":")
    if not sep:
        raise SpecParseError("simplex spec needs a 'kind:' prefix", text)
    if kind == "file":
        with open(body, encoding="utf-8") as fh:
            return load_simplex_json(fh.read())
    args = [a for a in body.split(",")] if body else []
    if kind == "std":
        if len(args) != 1:
            raise SpecParseError("std takes one argument", text)
        return standard_simplex(_int(args[0]))
    if kind == "scaled":
        if len(args) != 2:
            raise SpecParseError("scaled takes d,u", text)
        return scaled_simplex(_int(args[0]), _number(args[1]))
    if kind == "shifted":
        if len(args) < 3:
            raise SpecParseError("shifted takes d,u,v0_1,...,v0_d", text)
        d = _int(args[0])
        if len(args) != d + 2:
            raise SpecParseError(f"shifted with d={d} needs {d} offset coordinates", text)
        return shifted_simplex(d, _number(args[1]), [_number(a) for a in args[2:]])
    if kind == "interval":
        if len(args) != 2:
            raise SpecParseError("interval takes l,u", text)
        return interval(_number(args[0]), _number(args[1]))
    raise SpecParseError("unknown simplex kind", kind)


def parse_grid(text: str) -> list[Fraction]:
    """``a:b:step`` (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise SpecParseError("grid must look like a:b:step", text)
        a, b, step = (_number(p) for p in parts)
        if step <= 0:
            raise SpecParseError("grid step must be positive", parts[2])
        out = []
        x = a
        while x <= b:
            out.append(x)
            x += step
        return out
    return [_number(t) for t in text.split(",")]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) if not isinstance(x, str) else x for x in row])
    return buf.getvalue()


def _threads() -> int:
    raw = os.environ.get("SIMPLEXVOL_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise SpecParseError("SIMPLEXVOL_THREADS must be an integer", raw) from None
    return min(8, os.cpu_count() or 1)


def _s_from_degree(degree: int) -> int:
    if degree < 1 or degree % 2 == 0:
        raise SpecParseError("cubature degree must be odd and positive", str(degree))
    return (degree - 1) // 2


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _integrate(args) -> tuple[object, str, float]:
    J = parse_simplex(args.simplex)
    f = parse_function_spec(args.f, dim=J.dimension)
    method = args.method
    s = _s_from_degree(args.degree)
    if method in POLY_METHODS:
        poly = f.to_polynomial()
        if poly is None:
            raise PreconditionError(f"method {method} needs a polynomial integrand")
        return exact.integrate_polynomial(J, poly, method), method, 0
    if method in NUMERIC_METHODS:
        if method == "monte_carlo":
            est, err = cubature.monte_carlo_integrate(J.to_numeric(), f, args.samples, args.seed)
            return est, method, err
        make = cubature.conical_product_rule if method == "conical" else cubature.grundmann_moller_rule
        value = cubature.apply_rule(make(J.dimension, s).transplant(J), f)
        return value, f"cubature:{method},degree={2 * s + 1}", 0.0
    if method is not None and isinstance(f, LinPow) and f.integer_exponent and method in AFFINE_POWER_METHODS:
        return exact.integrate_affine_power(J, f.c, f.b, f.q, method), method, 0
    if method is not None and isinstance(f, ExpAffine) and method in EXP_METHODS:
        value, used = exact.integrate_exp_affine(J, f.c, f.b, method=method, return_method=True)
        if f.subtract_one:
            value -= float(simplex_volume(J))
        return value, used, 0.0
    if method is not None:
        raise PreconditionError(f"method {method} does not apply to {f.tag} integrands")
    q = relaxations.integrate_spec(J, f, relaxations.RelaxationConfig(s=s))
    return q.value, q.method, q.error


def _report_rows(report: relaxations.RelaxationReport):
    return [
        report.perspective_volume,
        report.naive_volume,
        report.cutoff_amount,
        report.cutoff_ratio,
        report.methods.get("perspective", ""),
        report.methods.get("naive", ""),
        report.errors.get("perspective", 0.0),
        report.errors.get("naive", 0.0),
    ]


REPORT_HEADER = [
    "perspective_volume",
    "naive_volume",
    "cutoff_amount",
    "cutoff_ratio",
    "method_perspective",
    "method_naive",
    "error_perspective",
    "error_naive",
]


def _volume(args) -> relaxations.RelaxationReport:
    J = parse_simplex(args.simplex)
    f = parse_function_spec(args.f, dim=J.dimension)
    config = relaxations.RelaxationConfig(
        s=_s_from_degree(args.degree),
        audit_convexity=args.audit,
        seed=args.seed,
        mc_samples=args.samples if args.mc else 0,
    )
    return relaxations.cutoff_report(J, f, config)


def _sweep_point(family: str, d: int, u: Fraction, s: int, k: Fraction, v0):
    if family == "logsumexp":
        return relaxations.logsumexp_sweep(d, [u], s)[0]
    if family == "exp_a":
        return relaxations.exp_family_volumes(relaxations.exp_family_case_a(d, float(u), float(k)))
    if family == "exp_b":
        return relaxations.exp_family_volumes(relaxations.exp_family_case_b(d, float(u), v0))
    raise SpecParseError("unknown sweep family", family)


def _sweep(args) -> list[tuple]:
    s = _s_from_degree(args.degree)
    grid = parse_grid(args.u_grid)
    k = _number(args.k)
    v0 = [float(_number(t)) for t in args.v0.split(",")] if args.v0 else [1.0] * args.d
    if len(v0) != args.d:
        raise SpecParseError(f"--v0 needs {args.d} coordinates", args.v0)
    if args.family not in ("logsumexp", "exp_a", "exp_b"):
        raise SpecParseError("unknown sweep family", args.family)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(lambda u: _sweep_point(args.family, args.d, u, s, k, v0), grid))
    return [(u, r.perspective_volume, r.naive_volume, r.cutoff_ratio) for u, r in zip(grid, reports)]


def _rule(args) -> str:
    make = cubature.grundmann_moller_rule if args.gm else cubature.conical_product_rule
    return cubature.rule_to_json(make(args.d, args.s))


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="simplexvol", description="Integrals over simplices and relaxation volumes.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_ArgumentParser)

    def common(p):
        p.add_argument("--simplex", required=True, help="std:d | scaled:d,u | shifted:d,u,v0... | interval:l,u | file:path")
        p.add_argument("--f", required=True, help="function spec, e.g. 'poly:x1*x2'")
        p.add_argument("--degree", type=int, default=5, help="cubature degree (odd), default 5")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=10**5, help="Monte-Carlo sample count")

    p = sub.add_parser("integrate", help="integrate a function over a simplex")
    common(p)
    p.add_argument("--method", choices=POLY_METHODS + AFFINE_POWER_METHODS + EXP_METHODS[1:] + NUMERIC_METHODS)

    p = sub.add_parser("volume", help="perspective/naive relaxation volumes")
    common(p)
    p.add_argument("--audit", action="store_true", help="run the midpoint convexity audit")
    p.add_argument("--mc", action="store_true", help="add a Monte-Carlo cross-check of the cone integral")

    p = sub.add_parser("sweep", help="cut-off ratio over a grid of u")
    p.add_argument("--family", required=True, help="logsumexp | exp_a | exp_b")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--u-grid", required=True, dest="u_grid", help="a:b:step or comma list")
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--k", default="1", help="apex factor for exp_a")
    p.add_argument("--v0", default=None, help="base vertex for exp_b, comma separated")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("rule", help="export a cubature rule as JSON")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--gm", action="store_true")
    kind.add_argument("--conical", action="store_true")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    return parser


def _execute(args) -> str:
    if args.verb == "integrate":
        value, method, err = _integrate(args)
        if args.format == "json":
            return json.dumps({"value": _fmt(value), "method": method, "error": _fmt(err)}) + "\n"
        return _csv(["value", "method", "error"], [[value, method, err]])
    if args.verb == "volume":
        report = _volume(args)
        if args.format == "json":
            return report.to_json() + "\n"
        return _csv(REPORT_HEADER, [_report_rows(report)])
    if args.verb == "sweep":
        rows = _sweep(args)
        if args.format == "json":
            return json.dumps([dict(zip(("u", "perspective", "naive", "ratio"), map(_fmt, r))) for r in rows]) + "\n"
        return _csv(["u", "perspective", "naive", "ratio"], rows)
    return _rule(args) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        stdout.write(_execute(args))
        return EXIT_OK
    except SpecParseError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except FileNotFoundError as exc:
        stderr.write(f"file not found: {exc.filename}\n")
        return EXIT_NOT_FOUND
    except (DegenerateSimplexError, DomainError, PreconditionError, DivergentIntegralError, ExactModeError) as exc:
        stderr.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except NumericalFailure as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
