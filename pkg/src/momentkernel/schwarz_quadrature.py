"""Schwarz functions of lines and circles and boundary quadrature identities.

Green's theorem in complex form gives, for a positively oriented polygon P
and an entire f,

    ∬_P f dA = (1/2i) ∮_{∂P} f(z) z̄ dz.

On each edge z̄ coincides with the (entire) Schwarz function of the edge's
line, so the contour can be deformed.  For a triangle the third edge is
rerouted along the other two, which expresses the area integral as an
analytic functional carried by two sides only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .quadrature import gauss_legendre


# --- Schwarz functions -----------------------------------------------------


@dataclass(frozen=True)
class SchwarzMap:
    """``S(z) = αz + β`` (kind ``affine``) or ``c̄ + ρ²/(z - c)`` (kind ``mobius``)."""

    kind: str
    alpha: complex = 0j
    beta: complex = 0j
    center: complex = 0j
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == "affine":
            if abs(abs(self.alpha) - 1.0) > 1e-12:
                raise ValueError("affine Schwarz map needs a unimodular linear part")
        elif self.kind == "mobius":
            if not self.radius > 0:
                raise ValueError("circle radius must be positive")
        else:
            raise ValueError(f"unknown Schwarz map kind {self.kind!r}")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "affine":
            out = self.alpha * z + self.beta
        else:
            out = np.conj(self.center) + self.radius**2 / (z - self.center)
        return out if out.ndim else complex(out)

    def reflect(self, z):
        """Reflection across the curve: ``z ↦ conj(S(z))``."""
        return np.conj(self(z))

    def to_json(self) -> dict:
        if self.kind == "affine":
            return {"kind": "affine", "alpha": [self.alpha.real, self.alpha.imag], "beta": [self.beta.real, self.beta.imag]}
        return {"kind": "mobius", "center": [self.center.real, self.center.imag], "radius": self.radius}


def line_schwarz(a: complex, b: complex) -> SchwarzMap:
    """Schwarz function of the line through ``a`` and ``b``."""
    a, b = complex(a), complex(b)
    if a == b:
        raise ValueError("line needs two distinct points")
    d = b - a
    S = SchwarzMap("affine", alpha=np.conj(d) / d, beta=(np.conj(a) * b - a * np.conj(b)) / d)
    scale = max(1.0, abs(a), abs(b))
    if abs(S(a) - np.conj(a)) + abs(S(b) - np.conj(b)) >= 1e-12 * scale:
        raise ArithmeticError("line Schwarz function failed its point check")
    return S


def circle_schwarz(c: complex, rho: float) -> SchwarzMap:
    """Schwarz function of the circle ``|z - c| = rho``."""
    if not rho > 0:
        raise ValueError("circle radius must be positive")
    S = SchwarzMap("mobius", center=complex(c), radius=float(rho))
    probe = complex(c) + rho * np.exp(0.5j * np.pi * np.arange(4) + 0.3j)
    if np.max(np.abs(S(probe) - np.conj(probe))) >= 1e-12 * max(1.0, abs(c) + rho):
        raise ArithmeticError("circle Schwarz function failed its point check")
    return S


# --- polygons --------------------------------------------------------------


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return np.sign(((b - a) * np.conj(c - a)).imag)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; vertices are reordered to positive orientation."""

    vertices: tuple[complex, ...]

    def __post_init__(self):
        v = tuple(complex(z) for z in self.vertices)
        if len(v) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        area = self._signed_area(v)
        scale = max(abs(z) for z in v) ** 2 or 1.0
        if abs(area) <= 1e-14 * scale:
            raise ValueError("degenerate polygon (zero area)")
        n = len(v)
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise ValueError("polygon edges intersect")
        if area < 0:
            v = v[::-1]
        object.__setattr__(self, "vertices", v)

    @staticmethod
    def _signed_area(v) -> float:
        z = np.array(v)
        return 0.5 * float(np.sum((np.conj(z) * np.roll(z, -1)).imag))

    @property
    def area(self) -> float:
        return self._signed_area(self.vertices)

    def edges(self) -> list[tuple[complex, complex]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


Entire = Callable[[np.ndarray], np.ndarray]


def as_entire(f) -> Entire:
    """A callable ``f(z)``; sequences are polynomial coefficients ``Σ c_k z^k``."""
    if callable(f):
        return f
    coef = np.asarray(f, dtype=complex)
    if coef.ndim != 1 or coef.size == 0:
        raise ValueError("polynomial needs a non-empty coefficient list")
    return lambda z: np.polyval(coef[::-1], z)


def monomial(k: int) -> Entire:
    if k < 0:
        raise ValueError("monomial degree must be non-negative")
    return lambda z: np.asarray(z, dtype=complex) ** k


@lru_cache(maxsize=None)
def _edge_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return gauss_legendre(order)


def _segment_integral(f: Entire, weight: Callable, a: complex, b: complex, order: int, sampled: list | None):
    """``∫_a^b f(z) weight(z) dz`` along the segment."""
    t, w = _edge_rule(order)
    z = a + (b - a) * t
    if sampled is not None:
        sampled.append(z)
    return complex(np.sum(w * f(z) * weight(z)) * (b - a))


def boundary_moment(P: Polygon, f, order: int = 32) -> complex:
    """``(1/2i) ∮_{∂P} f(z) z̄ dz``, which equals ``∬_P f dA``."""
    if not isinstance(P, Polygon):
        P = Polygon(tuple(P))
    f = as_entire(f)
    total = sum(_segment_integral(f, np.conj, a, b, order, None) for a, b in P.edges())
    return total / 2j


# --- analytic functionals ------------------------------------------------------


@dataclass(frozen=True)
class AnalyticFunctional:
    """``f ↦ (1/2i) Σ_j ∫_{contour_j} f(z) S_j(z) dz``.

    Each term is ``(polyline, weight)`` with the polyline a tuple of points and
    the weight a Schwarz map, or a signed sum ``((sign, map), ...)`` of them.
    """

    terms: tuple
    order: int = 32

    def carrier(self) -> list[tuple[complex, complex]]:
        segs = []
        for poly, _ in self.terms:
            segs.extend(zip(poly[:-1], poly[1:]))
        return segs

    def __call__(self, f, sampled: list | None = None) -> complex:
        f = as_entire(f)
        total = 0j
        for poly, weight in self.terms:
            wfun = _weight_function(weight)
            for a, b in zip(poly[:-1], poly[1:]):
                total += _segment_integral(f, wfun, a, b, self.order, sampled)
        return total / 2j


def _weight_function(weight):
    if isinstance(weight, SchwarzMap):
        return weight
    parts = tuple(weight)
    return lambda z: sum(sign * S(z) for sign, S in parts)


def two_side_functional(T: Polygon, order: int = 32) -> AnalyticFunctional:
    """Area functional of a triangle carried by its first two sides.

    Sides are ``v1→v2``, ``v2→v3``, ``v3→v1``.  Since ``f S3`` is entire, the
    integral over side 3 equals the integral along ``v3→v2→v1``, that is
    sides 2 and 1 reversed.  Merging terms on the same segment leaves side 1
    with weight ``S1 - S3`` and side 2 with weight ``S2 - S3``.
    """
    if not isinstance(T, Polygon):
        T = Polygon(tuple(T))
    if len(T.vertices) != 3:
        raise ValueError("two-side functional needs a triangle")
    v1, v2, v3 = T.vertices
    S1, S2, S3 = line_schwarz(v1, v2), line_schwarz(v2, v3), line_schwarz(v3, v1)
    return AnalyticFunctional(
        (
            ((v1, v2), ((1.0, S1), (-1.0, S3))),
            ((v2, v3), ((1.0, S2), (-1.0, S3))),
        ),
        order,
    )


@dataclass(frozen=True)
class TwoSideResult:
    two_side: complex
    direct: complex
    sampled: np.ndarray = field(repr=False)

    @property
    def abs_diff(self) -> float:
        return abs(self.two_side - self.direct)


def two_side_quadrature(T, f, order: int = 32) -> TwoSideResult:
    """``∬_T f dA`` through the two-side functional, with the three-side value."""
    if not isinstance(T, Polygon):
        T = Polygon(tuple(T))
    functional = two_side_functional(T, order)
    sampled: list = []
    value = functional(f, sampled)
    return TwoSideResult(value, boundary_moment(T, f, order), np.concatenate(sampled))


def distance_to_segment(z, a: complex, b: complex) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    d = b - a
    t = np.clip(((z - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def points_on_segment(z, a: complex, b: complex, tol: float = 1e-12) -> np.ndarray:
    """Mask of points lying on the closed segment ``[a, b]``."""
    return distance_to_segment(z, a, b) <= tol * max(1.0, abs(a), abs(b))

