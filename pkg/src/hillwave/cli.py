"""Command-line front end.

Every command prints one JSON document (``OutputRecord``) to stdout; the
chart command can emit CSV instead.  Failures print a JSON error document
to stderr and exit with 2 (numerical), 3 (I/O) or 64 (usage).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .coefficients import CharacteristicExponent, MathieuParams
from .errors import HillwaveError, IndexOutOfValidity, NoConvergence
from .floquet_oracle import (DEFAULT_ATOL, DEFAULT_RTOL, exponent_from_discriminant,
                             integrate_fundamental)
from .fourier_solution import (floquet_defect, ode_floquet_defect, recurrence_residuals,
                               residual, solve_coefficients)
from .hill_determinant import DEFAULT_N_MAX, DEFAULT_TOL, delta_general, delta_series
from .recursion_explicit import (RecursionSystem, delta_explicit, random_system, solve_uk,
                                 trajectory)
from .whittaker_hill import (FLAG_ORACLE, band_point, band_scan, exponent_from_rhs,
                             is_resonant, wh_rhs)

SCHEMA_VERSION = "1.0"
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3
EXIT_USAGE = 64
TOL_ENV = "HILLWAVE_TOL"
CSV_HEADER = ("a", "nu_re", "nu_im", "stability", "rhs", "flag")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class OutputRecord:
    command: str
    params: dict | None
    payload: dict
    diagnostics: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def as_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "params": self.params,
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        }


def _clean(obj):
    """Make a value JSON-safe; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def dumps(doc: dict, indent: int | None) -> str:
    return json.dumps(_clean(doc), indent=indent, allow_nan=False) + "\n"


def _fmt(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else format(x, ".17g")


def _nu_dict(nu: CharacteristicExponent | None):
    return None if nu is None else nu.as_dict()


# -- commands ---------------------------------------------------------------

def cmd_exponent(args) -> OutputRecord:
    p = MathieuParams(args.a, args.q)
    payload, diag = {}, {"tol": args.tol}
    rhs = None
    if args.method in ("wh", "both"):
        r = wh_rhs(p, args.tol)
        rhs = r.value
        payload["wh"] = {**exponent_from_rhs(r.value).as_dict(), "rhs": r.value, "delta0": r.delta0}
        diag.update(truncation_order=r.order, converged=True, tail_estimate=r.tail_estimate)
    if args.method in ("ode", "both"):
        fp = integrate_fundamental(p, args.rtol, args.atol)
        payload["ode"] = {**exponent_from_discriminant(fp.mu).as_dict(), "mu": fp.mu}
        diag.update(rtol=args.rtol, atol=args.atol, wronskian_defect=abs(fp.wronskian - 1.0))
        if rhs is not None:
            payload["discrepancy"] = abs((1.0 - 2.0 * rhs) - fp.mu)
    return OutputRecord("exponent", p.as_dict(), payload, diag)


def cmd_determinant(args) -> OutputRecord:
    p = MathieuParams(args.a, args.q)
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.converge:
        if args.method != "recursion":
            raise UsageError("--converge is only available with --method recursion")
        s = delta_series(p, n_max=args.n_max, tol=args.tol)
        if not s.converged:
            raise NoConvergence(args.n_max)
        return OutputRecord("determinant", p.as_dict(),
                            {"delta": s.limit, "method": "recursion", "limit": True},
                            {"tol": args.tol, "truncation_order": s.order, "converged": True,
                             "tail_estimate": s.tail_estimate, "n_max": args.n_max})
    if args.method == "direct":
        value = delta_general(p, 0.0, args.n)
    elif args.method == "explicit":
        value = delta_explicit(p, args.n)
    else:
        value = delta_series(p, n_max=args.n, tol=0.0).deltas[args.n]
    return OutputRecord("determinant", p.as_dict(),
                        {"delta": value, "method": args.method, "limit": False},
                        {"truncation_order": args.n, "dimension": 2 * args.n + 1})


def _chart_rows(points):
    for b in points:
        nu = b.nu
        yield (_fmt(b.a), _fmt(nu.re) if nu else "", _fmt(nu.im) if nu else "",
               nu.stability.value if nu else "", _fmt(b.rhs), b.flag)


def cmd_chart(args) -> OutputRecord | str:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.a_min > args.a_max:
        raise UsageError("--a-min must not exceed --a-max")
    points = band_scan(args.q, args.a_min, args.a_max, args.steps, args.tol)
    diag = {"tol": args.tol, "steps": args.steps, "nodes": len(points),
            "oracle_only": sum(b.flag == FLAG_ORACLE for b in points),
            "errors": sum(b.flag.startswith("error") for b in points)}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(_chart_rows(points))
        return buf.getvalue()
    rows = [{"a": b.a, "nu": _nu_dict(b.nu), "rhs": b.rhs, "flag": b.flag, "error": b.error}
            for b in points]
    return OutputRecord("chart", {"q": args.q, "a_min": args.a_min, "a_max": args.a_max},
                        {"points": rows}, diag)


def cmd_fourier(args) -> OutputRecord:
    p = MathieuParams(args.a, args.q)
    pt = band_point(args.a, args.q, args.tol) if is_resonant(args.a) else None
    if pt is not None and pt.nu is not None:
        nu = pt.nu
    else:
        nu = exponent_from_rhs(wh_rhs(p, args.tol).value)
    fc = solve_coefficients(nu, p, n=args.n, seed=args.seed)
    peak = float(np.max(np.abs(fc.coeffs)))
    payload = {
        "coefficients": fc.as_dict(),
        "residual": residual(fc, p, args.grid),
        "floquet_defect": floquet_defect(fc, args.grid),
        "ode_floquet_defect": ode_floquet_defect(fc, p, args.grid),
        "recurrence_residual": float(recurrence_residuals(fc, p).max()) / peak,
        "matrix_residual": fc.matrix_residual,
    }
    diag = {"tol": args.tol, "requested_order": args.n, "truncation_order": fc.order,
            "boundary_ratio": fc.boundary_ratio, "iterations": fc.iterations,
            "seed": args.seed, "grid": args.grid, "band_edge": fc.band_edge,
            "exponent_source": FLAG_ORACLE if pt is not None else "formula"}
    return OutputRecord("fourier", p.as_dict(), payload, diag)


def cmd_recur_demo(args) -> OutputRecord:
    if args.preset == "tribonacci":
        ones = (1.0,) * (args.k + 1)
        sys_ = RecursionSystem(ones, ones, ones)
        seeds = (1.0, 1.0, 1.0)
    else:
        rng = np.random.default_rng(args.seed)
        sys_ = random_system(rng, args.k)
        seeds = tuple(rng.uniform(-1.0, 1.0, 3).tolist())
    u = trajectory(sys_, *seeds, args.k)
    k, n = args.k, args.n
    if n < 4 or k - n + 3 < sys_.start or k - n < sys_.start - 3:
        raise IndexOutOfValidity(f"(k={k}, n={n}) is outside the valid range", k=k, n=n)
    explicit = solve_uk(sys_, u[k - n + 3], u[k - n + 2], u[k - n], k, n)
    direct = u[k]
    rel = abs(explicit - direct) / (abs(direct) or 1.0)
    payload = {"preset": args.preset, "k": k, "n": n, "seeds": list(seeds),
               "seed_indices": [k - n + 3, k - n + 2, k - n],
               "explicit": explicit, "direct": direct, "relative_error": rel}
    return OutputRecord("recur-demo", None, payload, {"seed": args.seed})


def cmd_verify(args) -> tuple[OutputRecord, int]:
    from .acceptance import run_all
    echo = None if args.quiet else (lambda line: print(line, file=sys.stderr, flush=True))
    results = run_all(echo)
    ok = all(r.passed for r in results)
    rec = OutputRecord("verify", None,
                       {"all_passed": ok, "criteria": [r.as_dict() for r in results]},
                       {"total_seconds": sum(r.seconds for r in results)})
    return rec, EXIT_OK if ok else EXIT_VERIFY_FAILED


# -- parser -----------------------------------------------------------------

def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not value > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return value


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=argparse.SUPPRESS,
                        help=f"convergence tolerance (default {DEFAULT_TOL:g} or ${TOL_ENV})")
    common.add_argument("--json-indent", type=int, default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress progress lines on stderr")

    parser = _Parser(prog="hillwave", parents=[common],
                     description="Mathieu characteristic exponents via the Hill determinant.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("exponent", "characteristic exponent at (a, q)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--method", choices=("wh", "ode", "both"), default="wh")
    p.add_argument("--rtol", type=_positive, default=DEFAULT_RTOL)
    p.add_argument("--atol", type=_positive, default=DEFAULT_ATOL)
    p.set_defaults(func=cmd_exponent)

    p = add("determinant", "truncated or converged Hill determinant at nu = 0")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--method", choices=("recursion", "direct", "explicit"), default="recursion")
    p.add_argument("--converge", action="store_true")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.set_defaults(func=cmd_determinant)

    p = add("chart", "stability chart along a for fixed q")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_chart)

    p = add("fourier", "Fourier coefficients of the Floquet solution")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=64)
    p.set_defaults(func=cmd_fourier)

    p = add("recur-demo", "explicit third-order recursion solve against iteration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--preset", choices=("random", "tribonacci"), default="random")
    p.set_defaults(func=cmd_recur_demo)

    p = add("verify", "run the acceptance suite")
    p.set_defaults(func=cmd_verify)
    return parser


def _error(code: str, message: str, details: dict | None = None) -> str:
    return dumps({"error": {"code": code, "message": message, "details": details or {}}}, None)


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.tol = getattr(args, "tol", None) or _default_tol()
        args.json_indent = getattr(args, "json_indent", None)
        args.quiet = getattr(args, "quiet", False)
        result = args.func(args)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        text = result if isinstance(result, str) else dumps(result.as_dict(), args.json_indent)
        _write(text, getattr(args, "out", None))
        return code
    except UsageError as exc:
        sys.stderr.write(_error("USAGE", str(exc)))
        return EXIT_USAGE
    except HillwaveError as exc:
        sys.stderr.write(dumps({"error": exc.to_dict()}, None))
        return EXIT_NUMERICAL
    except OSError as exc:
        sys.stderr.write(_error("IO_ERROR", str(exc), {"filename": getattr(exc, "filename", None)}))
        return EXIT_IO
    except ValueError as exc:
        sys.stderr.write(_error("USAGE", str(exc)))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
