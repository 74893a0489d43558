"""The exponential kernel ``E(z, w̄) = exp(-(1/pi) ∫_S dA(ζ) / ((ζ - z)(ζ̄ - w̄)))``.

Functions here take the two points ``z`` and ``w`` themselves; the
conjugation of the second argument happens inside.  Numeric values come
from the quadrature engine, closed forms cover disks and centred annuli.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import QuadratureConfig, distance_lower_bound, integrate_region
from .semialgebraic import Poly2, SemiAlgebraicSet, X, Y


class PreconditionError(ValueError):
    """An input lies outside the domain where an operation is defined."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


@dataclass(frozen=True)
class KernelEvaluation:
    value: complex
    z: complex
    w: complex
    method: str
    error_estimate: float = 0.0

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "w": [self.w.real, self.w.imag],
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "method": self.method,
            "error_estimate": self.error_estimate,
        }


@dataclass(frozen=True)
class Disk:
    radius: float = 1.0
    center: complex = 0j

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))


@dataclass(frozen=True)
class Annulus:
    r: float
    R: float
    center: complex = 0j

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ValueError(f"annulus needs 0 < r < R, got r={self.r}, R={self.R}")
        object.__setattr__(self, "center", complex(self.center))


Shape = Disk | Annulus


def default_margin(S: SemiAlgebraicSet) -> float:
    return 1e-3 * S.diagonal


def check_margin(S: SemiAlgebraicSet, points: Sequence[complex], margin: float | None = None) -> None:
    """Reject points closer than ``margin`` to ``S``."""
    delta = default_margin(S) if margin is None else float(margin)
    for p in points:
        d = distance_lower_bound(S, complex(p), 2 * delta)
        if not d > delta:
            raise PreconditionError(
                f"point {complex(p)} is within {delta:.3g} of the set (distance bound {d:.3g})",
                point=[complex(p).real, complex(p).imag],
                distance_bound=float(d),
                margin=delta,
            )


def _cauchy_integrand(zs: np.ndarray, ws: np.ndarray):
    zs = np.asarray(zs, dtype=complex).ravel()
    wbar = np.conj(np.asarray(ws, dtype=complex).ravel())

    def f(x, y):
        zeta = x + 1j * y
        return 1.0 / ((zeta[None, :] - zs[:, None]) * (np.conj(zeta)[None, :] - wbar[:, None]))

    return f


def eval_kernel_numeric(
    S: SemiAlgebraicSet,
    zs,
    ws,
    cfg: QuadratureConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Kernel values at the pairs ``(zs[k], ws[k])`` from one quadrature sweep.

    Returns ``(values, error_estimates)``.  No margin check is done here.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    zs, ws = np.broadcast_arrays(zs, ws)
    shape = zs.shape
    f = _cauchy_integrand(zs, ws)
    res = integrate_region(f, S, cfg, vector=True)
    integral = np.asarray(res.value, dtype=complex).reshape(shape)
    values = np.exp(-integral / np.pi)
    errors = np.abs(values) * res.error_estimate / np.pi
    return values, errors


def eval_exponential_kernel(
    S: SemiAlgebraicSet,
    z: complex,
    w: complex,
    cfg: QuadratureConfig | None = None,
    margin: float | None = None,
) -> KernelEvaluation:
    z, w = complex(z), complex(w)
    check_margin(S, (z, w), margin)
    values, errors = eval_kernel_numeric(S, [z], [w], cfg)
    return KernelEvaluation(complex(values[0]), z, w, "numeric", float(errors[0]))


def disk_kernel(z, w, radius: float = 1.0, center: complex = 0j):
    """``1 - 1/(u v̄)`` at the rescaled points ``u = (z - c)/R``, ``v = (w - c)/R``."""
    u = (np.asarray(z, dtype=complex) - center) / radius
    v = (np.asarray(w, dtype=complex) - center) / radius
    return 1.0 - 1.0 / (u * np.conj(v))


def annulus_kernel(z, w, r: float, R: float, center: complex = 0j):
    """Kernel of ``r < |ζ - c| < R`` for points in the hole or outside.

    With one point in the hole and the other outside the value is 1.
    """
    u = np.asarray(z, dtype=complex) - center
    v = np.asarray(w, dtype=complex) - center
    u, v = np.broadcast_arrays(u, v)
    p = u * np.conj(v)
    out_u, out_v = np.abs(u) > R, np.abs(v) > R
    in_u, in_v = np.abs(u) < r, np.abs(v) < r
    with np.errstate(divide="ignore", invalid="ignore"):
        outside = (p - R * R) / (p - r * r)
        hole = (r * r - p) / (R * R - p)
    res = np.where(out_u & out_v, outside, np.where(in_u & in_v, hole, 1.0 + 0j))
    return res if res.ndim else complex(res)


def _regime_check(shape: Shape, z: complex, w: complex) -> None:
    for p in (z, w):
        d = abs(p - shape.center)
        report = {"point": [p.real, p.imag], "distance_to_center": d}
        if isinstance(shape, Disk):
            if not d > shape.radius:
                raise PreconditionError(
                    f"point {p} is not outside the disk of radius {shape.radius}",
                    distance_to_set=0.0 if d < shape.radius else d - shape.radius,
                    **report,
                )
        elif not (d > shape.R or d < shape.r):
            raise PreconditionError(
                f"point {p} lies on the closed annulus {shape.r} <= |z| <= {shape.R}",
                distance_to_set=0.0,
                **report,
            )


def closed_form_kernel(shape: Shape, z: complex, w: complex) -> KernelEvaluation:
    z, w = complex(z), complex(w)
    _regime_check(shape, z, w)
    if isinstance(shape, Disk):
        v = disk_kernel(z, w, shape.radius, shape.center)
    else:
        v = annulus_kernel(z, w, shape.r, shape.R, shape.center)
    return KernelEvaluation(complex(v), z, w, "closed_form", 0.0)


def shape_to_set(shape: Shape) -> SemiAlgebraicSet:
    from .semialgebraic import annulus_set, disk_set

    if isinstance(shape, Disk):
        return disk_set(shape.radius, shape.center)
    return annulus_set(shape.r, shape.R, shape.center)


# --- transformation laws -------------------------------------------------


def translate_shape(shape: Shape, a: complex) -> Shape:
    if isinstance(shape, Disk):
        return Disk(shape.radius, shape.center + a)
    return Annulus(shape.r, shape.R, shape.center + a)


def scale_shape(shape: Shape, b: complex) -> Shape:
    if isinstance(shape, Disk):
        return Disk(abs(b) * shape.radius, b * shape.center)
    return Annulus(abs(b) * shape.r, abs(b) * shape.R, b * shape.center)


def invert_shape(shape: Shape) -> Shape:
    """Image under ``ζ -> 1/ζ``; the origin must lie off the closed shape."""
    c = shape.center
    if isinstance(shape, Disk):
        gap = abs(c) ** 2 - shape.radius**2
        if not gap > 0:
            raise PreconditionError("the origin lies in the closed disk")
        return Disk(shape.radius / gap, np.conj(c) / gap)
    if c != 0:
        raise PreconditionError("inversion of an off-centre annulus has no closed form")
    return Annulus(1.0 / shape.R, 1.0 / shape.r)


def _box_constraints(box, u: Poly2, v: Poly2, scale: Poly2 | None = None) -> list[Poly2]:
    """Constraints saying ``(u, v) / scale`` lies in ``box`` (``scale > 0``)."""
    x0, x1, y0, y1 = box
    s = scale if scale is not None else Poly2.constant(1.0)
    return [u - s * x0, s * x1 - u, v - s * y0, s * y1 - v]


def translate_set(S: SemiAlgebraicSet, a: complex) -> SemiAlgebraicSet:
    a = complex(a)
    x0, x1, y0, y1 = S.box
    cons = tuple(p.compose_linear(np.eye(2), (-a.real, -a.imag)) for p in S.constraints)
    return SemiAlgebraicSet((x0 + a.real, x1 + a.real, y0 + a.imag, y1 + a.imag), cons)


def scale_set(S: SemiAlgebraicSet, b: complex) -> SemiAlgebraicSet:
    b = complex(b)
    if b == 0:
        raise PreconditionError("scaling factor must be non-zero")
    # ζ in bS  <=>  ζ / b in S
    ib = 1.0 / b
    Minv = np.array([[ib.real, -ib.imag], [ib.imag, ib.real]])
    cons = [p.compose_linear(Minv) for p in S.constraints]
    x0, x1, y0, y1 = S.box
    corners = np.array([complex(x, y) for x in (x0, x1) for y in (y0, y1)]) * b
    box = (corners.real.min(), corners.real.max(), corners.imag.min(), corners.imag.max())
    if b.imag != 0:
        u = Poly2({(1, 0): Minv[0, 0], (0, 1): Minv[0, 1]})
        v = Poly2({(1, 0): Minv[1, 0], (0, 1): Minv[1, 1]})
        cons += _box_constraints(S.box, u, v)
    return SemiAlgebraicSet(box, tuple(cons))


def invert_set(S: SemiAlgebraicSet) -> SemiAlgebraicSet:
    """``{ζ : 1/ζ in S}`` with constraints cleared of denominators."""
    d = distance_lower_bound(S, 0j, S.diagonal)
    if not d > 0:
        raise PreconditionError("the origin lies in the closure of the set")
    # 1/ζ = (x, -y) / (x² + y²); multiply through by a positive power of |ζ|²
    r2 = X * X + Y * Y
    cons = []
    for p in S.constraints:
        deg = p.degree
        q = Poly2()
        for (a, b), c in p.coeffs.items():
            q = q + (c * (-1) ** b) * (X**a) * (Y**b) * r2 ** (deg - a - b)
        cons.append(q)
    cons += _box_constraints(S.box, X, -Y, r2)
    rad = 1.0 / d
    return SemiAlgebraicSet((-rad, rad, -rad, rad), tuple(cons))


def _eval(obj, z, w, cfg, margin):
    if isinstance(obj, SemiAlgebraicSet):
        return eval_exponential_kernel(obj, z, w, cfg, margin).value
    return closed_form_kernel(obj, z, w).value


def transform_kernel(
    law: str,
    S: SemiAlgebraicSet | Shape,
    z: complex,
    w: complex,
    cfg: QuadratureConfig | None = None,
    a: complex = 0j,
    b: complex = 1.0,
    margin: float | None = None,
) -> tuple[complex, complex]:
    """Both sides of a transformation identity, each evaluated independently.

    ``translation``: ``E_{S+a}(z+a, w+a)`` against ``E_S(z, w)``.
    ``scaling``: ``E_{bS}(bz, bw)`` against ``E_S(z, w)``.
    ``inversion``: ``E_{1/S}(1/z, 1/w)`` against
    ``E_S(0, 0) E_S(z, w) / (E_S(0, w) E_S(z, 0))``.
    """
    z, w = complex(z), complex(w)
    closed = not isinstance(S, SemiAlgebraicSet)
    if law == "translation":
        a = complex(a)
        T = translate_shape(S, a) if closed else translate_set(S, a)
        lhs = _eval(T, z + a, w + a, cfg, margin)
        rhs = _eval(S, z, w, cfg, margin)
    elif law == "scaling":
        b = complex(b)
        if b == 0:
            raise PreconditionError("scaling factor must be non-zero")
        T = scale_shape(S, b) if closed else scale_set(S, b)
        m = None if margin is None else margin * abs(b)
        lhs = _eval(T, b * z, b * w, cfg, m)
        rhs = _eval(S, z, w, cfg, margin)
    elif law == "inversion":
        if z == 0 or w == 0:
            raise PreconditionError("inversion needs z and w away from the origin")
        T = invert_shape(S) if closed else invert_set(S)
        lhs = _eval(T, 1 / z, 1 / w, cfg, margin)
        rhs = (
            _eval(S, 0j, 0j, cfg, margin)
            * _eval(S, z, w, cfg, margin)
            / (_eval(S, 0j, w, cfg, margin) * _eval(S, z, 0j, cfg, margin))
        )
    else:
        raise ValueError(f"unknown law {law!r}")
    return complex(lhs), complex(rhs)


def schwarz_reflection_circle(w: complex, R: float, center: complex = 0j) -> complex:
    return center + R * R / np.conj(w - center)


def schwarz_factorization_check(R: float, samples: Sequence[tuple[complex, complex]]) -> float:
    """Largest ``|E(z, w̄) z - (z - w*)|`` over the samples, ``w* = R²/w̄``."""
    worst = 0.0
    shape = Disk(R)
    for z, w in samples:
        z, w = complex(z), complex(w)
        if not (abs(z) > R and abs(w) > R):
            raise PreconditionError(f"sample ({z}, {w}) is not outside the circle of radius {R}")
        E = closed_form_kernel(shape, z, w).value
        worst = max(worst, abs(E * z - (z - schwarz_reflection_circle(w, R))))
    return worst
