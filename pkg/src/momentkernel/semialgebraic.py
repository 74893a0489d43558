"""Bivariate polynomials, compact semi-algebraic sets and moment vectors.

Multi-indices are ordered graded-lexicographically: total degree first, then
decreasing power of ``x``.  For ``N = 2`` the order is::

    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2)

Every module in the package uses this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, int]


def moment_dimension(N: int) -> int:
    """Number of multi-indices with ``|alpha| <= N``."""
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    return (N + 1) * (N + 2) // 2


def multi_indices(N: int) -> list[MultiIndex]:
    """All ``(a1, a2)`` with ``a1 + a2 <= N`` in graded-lex order."""
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    return [(k - j, j) for k in range(N + 1) for j in range(k + 1)]


def monomial_matrix(N: int, x, y) -> np.ndarray:
    """Rows ``x**a1 * y**a2`` for every multi-index, shape ``(d, npts)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xp = [np.ones_like(x)]
    yp = [np.ones_like(y)]
    for _ in range(N):
        xp.append(xp[-1] * x)
        yp.append(yp[-1] * y)
    return np.stack([xp[a] * yp[b] for a, b in multi_indices(N)])


@dataclass(frozen=True)
class Poly2:
    """Real polynomial in ``(x, y)`` stored as ``{(a1, a2): coefficient}``.

    Zero coefficients are dropped; ``degree`` is the true total degree
    (``0`` for the zero polynomial).
    """

    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), c in dict(self.coeffs).items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in multi-index {(a, b)}")
            c = float(c)
            if c != 0.0:
                clean[(a, b)] = clean.get((a, b), 0.0) + c
        object.__setattr__(self, "coeffs", {k: v for k, v in clean.items() if v != 0.0})

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @classmethod
    def constant(cls, c: float) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def from_vector(cls, c: Sequence[float], N: int) -> "Poly2":
        """Build from a coefficient vector in graded-lex order."""
        c = np.asarray(c, dtype=float)
        idx = multi_indices(N)
        if c.shape != (len(idx),):
            raise ValueError(f"expected {len(idx)} coefficients for order {N}, got {c.shape}")
        return cls(dict(zip(idx, c.tolist())))

    def to_vector(self, N: int) -> np.ndarray:
        if self.degree > N:
            raise ValueError(f"polynomial of degree {self.degree} does not fit order {N}")
        return np.array([self.coeffs.get(a, 0.0) for a in multi_indices(N)])

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (a, b), c in self.coeffs.items():
            out = out + c * x**a * y**b
        return out

    def __add__(self, other) -> "Poly2":
        if not isinstance(other, Poly2):
            other = Poly2.constant(float(other))
        d = dict(self.coeffs)
        for k, v in other.coeffs.items():
            d[k] = d.get(k, 0.0) + v
        return Poly2(d)

    def __neg__(self) -> "Poly2":
        return Poly2({k: -v for k, v in self.coeffs.items()})

    __radd__ = __add__

    def __sub__(self, other) -> "Poly2":
        return self + (-other)

    def __rsub__(self, other) -> "Poly2":
        return (-self) + other

    def __mul__(self, other) -> "Poly2":
        if isinstance(other, Poly2):
            d: dict[MultiIndex, float] = {}
            for (a, b), c in self.coeffs.items():
                for (e, f), g in other.coeffs.items():
                    d[(a + e, b + f)] = d.get((a + e, b + f), 0.0) + c * g
            return Poly2(d)
        return Poly2({k: v * float(other) for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly2":
        out = Poly2.constant(1.0)
        for _ in range(n):
            out = out * self
        return out

    def compose_linear(self, A, shift=(0.0, 0.0)) -> "Poly2":
        """Return ``q(x, y) = p(A @ (x, y) + shift)``."""
        A = np.asarray(A, dtype=float)
        u = Poly2({(1, 0): A[0, 0], (0, 1): A[0, 1], (0, 0): shift[0]})
        v = Poly2({(1, 0): A[1, 0], (0, 1): A[1, 1], (0, 0): shift[1]})
        return self.substitute(u, v)

    def substitute(self, u: "Poly2", v: "Poly2") -> "Poly2":
        """Return ``p(u(x, y), v(x, y))``."""
        out = Poly2()
        upow = [Poly2.constant(1.0)]
        vpow = [Poly2.constant(1.0)]
        for _ in range(self.degree):
            upow.append(upow[-1] * u)
            vpow.append(vpow[-1] * v)
        for (a, b), c in self.coeffs.items():
            out = out + c * (upow[a] * vpow[b])
        return out

    def line_coefficients(self, s, along_y: bool = True) -> np.ndarray:
        """Coefficients of ``t -> p`` on the lines ``x = s`` (or ``y = s``).

        Returns shape ``(len(s), deg_t + 1)`` with ascending powers of ``t``.
        """
        s = np.asarray(s, dtype=float)
        if self.is_zero:
            return np.zeros((s.size, 1))
        pick = (lambda a, b: (b, a)) if along_y else (lambda a, b: (a, b))
        deg_t = max(pick(a, b)[0] for a, b in self.coeffs)
        out = np.zeros((s.size, deg_t + 1))
        for (a, b), c in self.coeffs.items():
            kt, ks = pick(a, b)
            out[:, kt] += c * s.ravel() ** ks
        return out

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [[a, b, c] for (a, b), c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Poly2":
        extra = set(doc) - {"degree", "coeffs"}
        if extra:
            raise ValueError(f"unknown polynomial fields: {sorted(extra)}")
        p = cls({(int(a), int(b)): c for a, b, c in doc.get("coeffs", [])})
        if "degree" in doc and p.degree > int(doc["degree"]):
            raise ValueError(f"coefficients exceed declared degree {doc['degree']}")
        return p

    def __repr__(self):
        terms = " + ".join(f"{c:g}*x^{a}*y^{b}" for (a, b), c in sorted(self.coeffs.items()))
        return f"Poly2({terms or '0'})"


X = Poly2({(1, 0): 1.0})
Y = Poly2({(0, 1): 1.0})


@dataclass(frozen=True)
class SemiAlgebraicSet:
    """``{(x, y) in box : p_i(x, y) > 0 for all i}``.

    ``box`` is ``(xmin, xmax, ymin, ymax)``.  A point where a constraint is
    exactly zero is outside.
    """

    box: tuple[float, float, float, float]
    constraints: tuple[Poly2, ...] = ()

    def __post_init__(self):
        box = tuple(float(v) for v in self.box)
        if len(box) != 4:
            raise ValueError("box must be (xmin, xmax, ymin, ymax)")
        if not (box[1] > box[0] and box[3] > box[2]):
            raise ValueError(f"box must have positive width and height, got {box}")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def diagonal(self) -> float:
        x0, x1, y0, y1 = self.box
        return float(np.hypot(x1 - x0, y1 - y0))

    @property
    def box_area(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)

    def indicator(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x0, x1, y0, y1 = self.box
        inside = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
        for p in self.constraints:
            inside &= p(x, y) > 0
        return inside

    def with_constraints(self, *extra: Poly2) -> "SemiAlgebraicSet":
        return SemiAlgebraicSet(self.box, self.constraints + tuple(extra))

    def to_json(self) -> dict:
        return {"box": list(self.box), "constraints": [p.to_json() for p in self.constraints]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "SemiAlgebraicSet":
        extra = set(doc) - {"box", "constraints"}
        if extra:
            raise ValueError(f"unknown set fields: {sorted(extra)}")
        return cls(tuple(doc["box"]), tuple(Poly2.from_json(p) for p in doc.get("constraints", [])))


def contains(S: SemiAlgebraicSet, x: float, y: float) -> bool:
    return bool(S.indicator(x, y))


def eval_poly(p: Poly2, x, y):
    return p(x, y)


def disk_set(radius: float = 1.0, center: complex = 0j) -> SemiAlgebraicSet:
    """Open disk as a one-constraint set on its bounding box."""
    center = complex(center)
    cx, cy = center.real, center.imag
    p = Poly2.constant(radius**2) - (X - cx) ** 2 - (Y - cy) ** 2
    return SemiAlgebraicSet((cx - radius, cx + radius, cy - radius, cy + radius), (p,))


def annulus_set(r: float, R: float, center: complex = 0j) -> SemiAlgebraicSet:
    if not 0 < r < R:
        raise ValueError(f"annulus needs 0 < r < R, got r={r}, R={R}")
    center = complex(center)
    cx, cy = center.real, center.imag
    q = (X - cx) ** 2 + (Y - cy) ** 2
    return SemiAlgebraicSet(
        (cx - R, cx + R, cy - R, cy + R),
        (Poly2.constant(R**2) - q, q - Poly2.constant(r**2)),
    )


def polygon_set(vertices: Iterable[complex]) -> SemiAlgebraicSet:
    """Convex polygon with positively oriented vertices."""
    v = [complex(z) for z in vertices]
    xs = [z.real for z in v]
    ys = [z.imag for z in v]
    cons = []
    for a, b in zip(v, v[1:] + v[:1]):
        # left of the directed edge a -> b
        d = b - a
        cons.append(Poly2({(1, 0): -d.imag, (0, 1): d.real, (0, 0): d.imag * a.real - d.real * a.imag}))
    return SemiAlgebraicSet((min(xs), max(xs), min(ys), max(ys)), tuple(cons))


@dataclass(frozen=True)
class MomentVector:
    """Moments ``a_alpha`` for ``|alpha| <= order`` in graded-lex order."""

    order: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float).copy()
        if e.shape != (moment_dimension(self.order),):
            raise ValueError(
                f"order {self.order} needs {moment_dimension(self.order)} entries, got {e.shape}"
            )
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __getitem__(self, alpha: MultiIndex) -> float:
        return float(self.entries[multi_indices(self.order).index(tuple(alpha))])

    def pair(self, p: Poly2) -> float:
        """The functional ``l_a(p) = sum c_alpha a_alpha``."""
        return float(p.to_vector(self.order) @ self.entries)

    def __add__(self, other: "MomentVector") -> "MomentVector":
        return MomentVector(self.order, self.entries + other.entries)

    def __mul__(self, t: float) -> "MomentVector":
        return MomentVector(self.order, self.entries * float(t))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"order": self.order, "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, doc: Mapping) -> "MomentVector":
        extra = set(doc) - {"order", "entries"}
        if extra:
            raise ValueError(f"unknown moment fields: {sorted(extra)}")
        return cls(int(doc["order"]), np.asarray(doc["entries"], dtype=float))
