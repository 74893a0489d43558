"""Command-line interface: JSON in, JSON out.

Every subcommand reads a JSON document (``--input``, default standard input),
validates it against ``schemas/<subcommand>.input.json`` and writes
``{"inputs_echo", "result", "diagnostics"}`` to ``--output`` (default
standard output).  Exit codes: 0 success, 2 invalid input, 3 numerical
failure.  Errors are reported as a JSON object on standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from functools import lru_cache
from importlib import resources
from typing import Any, Callable

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__
from .kernel import (
    Annulus,
    Disk,
    PreconditionError,
    closed_form_kernel,
    eval_exponential_kernel,
    shape_to_set,
)
from .lproblem import (
    LProblemConfig,
    ProblemError,
    chebyshev_bounds,
    critical_L,
    extremal_reconstruct,
    krein_search,
    moments_of_sign,
    zero_set_points,
)
from .positivity import (
    AnnulusKernel,
    DiskKernel,
    NumericKernel,
    UnitKernel,
    commutator_report,
    default_sample_points,
    gram_matrix,
    psd_gram_check,
    reconstruct_operator,
    sandwich_check,
    verify_determinantal_identity,
)
from .quadrature import QuadratureConfig, moments_with_error
from .schwarz_quadrature import Polygon, monomial, two_side_quadrature
from .semialgebraic import MomentVector, Poly2, SemiAlgebraicSet

SUBCOMMANDS = (
    "moments",
    "kernel",
    "critical-l",
    "krein",
    "reconstruct",
    "chebyshev",
    "sign-moments",
    "positivity",
    "factorize",
    "quadrature-identity",
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class InputError(Exception):
    def __init__(self, message: str, details: Any = None):
        super().__init__(message)
        self.details = details


class NumericalFailure(Exception):
    def __init__(self, message: str, details: Any = None, document: dict | None = None):
        super().__init__(message)
        self.details = details
        self.document = document


# --- JSON with 17 significant digits -------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _num(x) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cmatrix(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


# --- schemas -------------------------------------------------------------


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("momentkernel").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _validate(doc: Any, name: str) -> None:
    validator = Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise InputError(
            f"input does not match schema {name}",
            [{"path": "/".join(map(str, e.absolute_path)), "message": e.message} for e in errors],
        )


# --- input decoding ---------------------------------------------------------


def _complex(v) -> complex:
    return complex(float(v[0]), float(v[1]))


def _set(doc: dict) -> SemiAlgebraicSet:
    try:
        return SemiAlgebraicSet.from_json(doc)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from exc


def _moments(doc: dict) -> MomentVector:
    try:
        return MomentVector.from_json(doc)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _poly(doc: dict) -> Poly2:
    try:
        return Poly2.from_json(doc)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _shape(doc: dict):
    try:
        c = _complex(doc.get("center", [0.0, 0.0]))
        if doc["shape"] == "disk":
            return Disk(float(doc.get("radius", 1.0)), c)
        return Annulus(float(doc["r"]), float(doc["R"]), c)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _positivity_kernel(doc: dict, qcfg: QuadratureConfig):
    kind = doc["type"]
    if kind == "disk":
        return DiskKernel(float(doc.get("radius", 1.0)))
    if kind == "annulus":
        if not 0 < doc["r"] < doc["R"]:
            raise InputError("annulus needs 0 < r < R")
        return AnnulusKernel(float(doc["r"]), float(doc["R"]))
    if kind == "unit":
        return UnitKernel()
    return NumericKernel(_set(doc["set"]), qcfg)


def _pairs(doc: list) -> list[tuple[complex, complex]]:
    pts = [(_complex(a), _complex(b)) for a, b in doc]
    for s, t in pts:
        if not (abs(s) > 1 and abs(t) > 1):
            raise InputError(f"sample pair ({s}, {t}) must lie outside the closed unit disk")
    return pts


# --- subcommand handlers ----------------------------------------------------

Handler = Callable[[dict, argparse.Namespace], tuple[dict, dict]]


def _qcfg(args) -> QuadratureConfig:
    return QuadratureConfig(tol=args.tol, max_depth=args.max_depth, gauss_order=args.gauss_order)


def _lcfg(args) -> LProblemConfig:
    return LProblemConfig(grid=args.grid, seed=args.seed, quadrature=_qcfg(args))


def run_moments(doc, args):
    S = _set(doc["set"])
    m, res = moments_with_error(S, int(doc["order"]), _qcfg(args))
    return m.to_json(), {"error_estimate": res.error_estimate, "cells_used": res.cells_used}


def run_kernel(doc, args):
    z, w = _complex(doc["z"]), _complex(doc["w"])
    method = doc.get("method", "auto")
    dom = doc["domain"]
    if "shape" in dom and method in ("auto", "closed_form"):
        ev = closed_form_kernel(_shape(dom), z, w)
    else:
        if "shape" in dom:
            S = shape_to_set(_shape(dom))
        else:
            if method == "closed_form":
                raise InputError("closed_form needs a disk or annulus domain")
            S = _set(dom)
        ev = eval_exponential_kernel(S, z, w, _qcfg(args), doc.get("margin"))
    out = ev.to_json()
    return out, {"error_estimate": ev.error_estimate}


def run_critical_l(doc, args):
    S = _set(doc["set"])
    a = _moments(doc["moments"])
    L0, p = critical_L(S, a.order, a, _lcfg(args))
    result = {"L0": _num(L0), "p_star": p.to_json() if p is not None else None}
    return result, {"grid": args.grid}


def run_krein(doc, args):
    S = _set(doc["set"])
    a = _moments(doc["moments"])
    kr = krein_search(S, a.order, a, _lcfg(args))
    return (
        {"margin": kr.margin, "solvable": kr.solvable, "maximizer": kr.maximizer.to_json()},
        {"seed": args.seed, "grid": min(args.grid, 100)},
    )


def run_reconstruct(doc, args):
    S = _set(doc["set"])
    a = _moments(doc["moments"])
    sol = extremal_reconstruct(
        S,
        a.order,
        a,
        _lcfg(args),
        variant=doc.get("variant", "unit"),
        L=float(doc.get("L", 1.0)),
    )
    result = {
        "p": sol.p.to_json(),
        "critical_L": _num(sol.critical_L),
        "moment_residual": sol.moment_residual,
        "converged": sol.converged,
        "variant": sol.variant,
    }
    if args.emit_grid:
        pts = zero_set_points(sol.p, S, resolution=min(args.grid, 400))
        result["zero_set"] = pts.tolist()
    diag = {"seed": args.seed, "moment_residual": sol.moment_residual}
    if not sol.converged:
        raise NumericalFailure(
            f"reconstruction residual {sol.moment_residual:.3g} above threshold",
            {"moment_residual": sol.moment_residual},
            {"result": result, "diagnostics": diag},
        )
    return result, diag


def run_chebyshev(doc, args):
    S = _set(doc["set"])
    a = _moments(doc["moments"])
    psi = _poly(doc["psi"])
    cb = chebyshev_bounds(S, a.order, a, psi, _lcfg(args))
    result = {
        "min_value": cb.min_value,
        "max_value": cb.max_value,
        "p_lower": cb.p_lower.to_json(),
        "p_upper": cb.p_upper.to_json(),
    }
    return result, {"grid_nodes": cb.grid.size}


def run_sign_moments(doc, args):
    S = _set(doc["set"])
    p = _poly(doc["p"])
    if p.is_zero:
        raise InputError("p must be non-zero")
    m = moments_of_sign(p, S, int(doc["order"]), _qcfg(args))
    return m.to_json(), {}


def run_positivity(doc, args):
    E = _positivity_kernel(doc["kernel"], _qcfg(args))
    pts = _pairs(doc["points"])
    tol = float(doc.get("psd_tol", 1e-8))
    A = gram_matrix(E, pts)
    ok, lam = psd_gram_check(A, tol)
    sw = sandwich_check(E, pts, tol)
    result = {
        "gram_psd": ok,
        "lambda_min": lam,
        "sandwich": {
            "lower_psd": sw.lower_psd,
            "upper_psd": sw.upper_psd,
            "lambda_min_lower": sw.lambda_min_lower,
            "lambda_min_upper": sw.lambda_min_upper,
        },
    }
    return result, {"asymmetry": A.asymmetry, "points": len(pts)}


def run_factorize(doc, args):
    E = _positivity_kernel(doc["kernel"], _qcfg(args))
    pts = _pairs(doc["points"]) if "points" in doc else default_sample_points(int(doc.get("samples", 20)))
    try:
        op = reconstruct_operator(E, pts)
    except ValueError as exc:
        raise NumericalFailure(str(exc)) from exc
    cr = commutator_report(op)
    diag = dict(op.diagnostics)
    diag.update(
        {
            "norm": op.norm,
            "commutator_ratio_on_samples": cr.ratio_on_samples,
            "commutator_action_residual": cr.action_residual,
            "commutator_singular_values": cr.full_singular_values.tolist(),
        }
    )
    if "holdout" in doc:
        rep = verify_determinantal_identity(op, E, _pairs(doc["holdout"]))
        diag["identity_residuals"] = asdict(rep)
    result = {"dimension": op.dimension, "T": _cmatrix(op.T), "xi": _cmatrix(op.xi)}
    return result, diag


def _parse_triangle(text: str) -> list[complex]:
    try:
        pts = [complex(p.strip().replace("i", "j").replace(" ", "")) for p in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse triangle {text!r}") from exc
    if len(pts) != 3:
        raise InputError("a triangle needs exactly three vertices")
    return pts


def run_quadrature_identity(doc, args):
    if "triangle" in doc:
        verts = [_complex(v) for v in doc["triangle"]]
    elif args.triangle is not None:
        verts = _parse_triangle(args.triangle)
    else:
        raise InputError("a triangle is required (--triangle or input field)")
    k = int(doc.get("monomial", args.monomial if args.monomial is not None else 0))
    if k < 0:
        raise InputError("monomial degree must be non-negative")
    try:
        T = Polygon(tuple(verts))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    r = two_side_quadrature(T, monomial(k))
    result = {"direct": _cx(r.direct), "two_side": _cx(r.two_side), "abs_diff": r.abs_diff}
    return result, {"triangle": [_cx(v) for v in T.vertices], "monomial": k}


HANDLERS: dict[str, Handler] = {
    "moments": run_moments,
    "kernel": run_kernel,
    "critical-l": run_critical_l,
    "krein": run_krein,
    "reconstruct": run_reconstruct,
    "chebyshev": run_chebyshev,
    "sign-moments": run_sign_moments,
    "positivity": run_positivity,
    "factorize": run_factorize,
    "quadrature-identity": run_quadrature_identity,
}


# --- driver ----------------------------------------------------------------

DEFAULTS = {"tol": 1e-8, "grid": 200, "seed": 0, "max_depth": 12, "gauss_order": 8}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="-", help="input JSON file ('-' for standard input)")
    common.add_argument("--output", default="-", help="output JSON file ('-' for standard output)")
    common.add_argument("--tol", type=float, default=DEFAULTS["tol"], help="quadrature tolerance")
    common.add_argument("--grid", type=int, default=DEFAULTS["grid"], help="LP grid resolution per axis")
    common.add_argument("--seed", type=int, default=DEFAULTS["seed"], help="random seed")
    common.add_argument("--max-depth", type=int, default=DEFAULTS["max_depth"], help="quadtree depth limit")
    common.add_argument("--gauss-order", type=int, default=DEFAULTS["gauss_order"], help="Gauss points per direction")
    parser = argparse.ArgumentParser(prog="momentkernel", description="Moment problems and exponential kernels.")
    parser.add_argument("--version", action="store_true", help="print version and configuration defaults")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "reconstruct":
            p.add_argument("--emit-grid", action="store_true", help="include the recovered zero-set points")
        if name == "quadrature-identity":
            p.add_argument("--triangle", help='three vertices, e.g. "0,1,1j"')
            p.add_argument("--monomial", type=int, help="degree k of f(z) = z^k")
    return parser


def _error(kind: str, message: str, details: Any = None) -> None:
    doc = {"error": {"type": kind, "message": message}}
    if details is not None:
        doc["error"]["details"] = details
    sys.stderr.write(dumps(doc) + "\n")


def _read_input(args) -> dict:
    if args.command == "quadrature-identity" and args.input == "-" and args.triangle is not None:
        return {}
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", {"line": exc.lineno, "column": exc.colno}) from exc
    return doc


def _write(args, doc: dict) -> None:
    text = dumps(doc) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _flags(args) -> dict:
    out = {k: getattr(args, k) for k in DEFAULTS}
    if args.command == "reconstruct":
        out["emit_grid"] = args.emit_grid
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if args.version:
        sys.stdout.write(dumps({"version": __version__, "defaults": DEFAULTS}) + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        _error("validation", "a subcommand is required")
        return EXIT_INVALID
    name = args.command
    try:
        if not args.tol > 0 or args.grid < 2 or args.max_depth < 1 or args.gauss_order < 2:
            raise InputError("flags out of range: need tol > 0, grid >= 2, max-depth >= 1, gauss-order >= 2")
        doc = _read_input(args)
        _validate(doc, f"{name}.input")
        result, diagnostics = HANDLERS[name](doc, args)
    except InputError as exc:
        _error("validation", str(exc), exc.details)
        return EXIT_INVALID
    except NumericalFailure as exc:
        if exc.document is not None:
            _write(args, {"inputs_echo": {"input": doc, "flags": _flags(args)}, **exc.document})
        _error("numerical", str(exc), exc.details)
        return EXIT_NUMERICAL
    except PreconditionError as exc:
        _error("numerical", str(exc), exc.details or None)
        return EXIT_NUMERICAL
    except (ProblemError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _error("numerical", str(exc))
        return EXIT_NUMERICAL
    except ValueError as exc:
        _error("validation", str(exc))
        return EXIT_INVALID
    out = {"inputs_echo": {"input": doc, "flags": _flags(args)}, "result": result, "diagnostics": diagnostics}
    _write(args, out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
