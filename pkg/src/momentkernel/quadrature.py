"""Adaptive quadtree integration over semi-algebraic regions.

Cells are classified by the Bernstein coefficients of each constraint, which
bound it on the whole cell, so no part of the region can be skipped.
Interior cells get a tensor Gauss-Legendre rule.  On boundary cells the
default ``"lines"`` rule integrates along Gauss lines transversal to the
nearest zero set and splits every line at the real roots of the constraint
polynomials, so the region is resolved exactly along each line.  The ``"indicator"`` rule instead applies the set indicator at the
tensor nodes and refines boundary cells down to ``max_depth``.

A cell is accepted when the sum over its four children agrees with the cell
value to within its share of ``tol``; the accepted total is the children
sum and the discrepancies add up to ``error_estimate``.  All reductions run
in a fixed order, so results are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .semialgebraic import MomentVector, Poly2, SemiAlgebraicSet, monomial_matrix, multi_indices

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_MAX_CHUNK_VALUES = 4_000_000


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-8
    max_depth: int = 12
    gauss_order: int = 8
    boundary_rule: str = "lines"
    min_depth: int = 3

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.gauss_order < 2:
            raise ValueError(f"gauss_order must be >= 2, got {self.gauss_order}")
        if self.boundary_rule not in ("lines", "indicator"):
            raise ValueError(f"unknown boundary rule {self.boundary_rule!r}")
        if self.min_depth < 0:
            raise ValueError("min_depth must be non-negative")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float | np.ndarray
    error_estimate: float
    cells_used: int


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(n)
    return (t + 1.0) / 2.0, w / 2.0


class _Cells:
    """Structure-of-arrays batch of axis-aligned cells."""

    __slots__ = ("x0", "x1", "y0", "y1")

    def __init__(self, x0, x1, y0, y1):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1

    def __len__(self):
        return self.x0.size

    def take(self, mask) -> "_Cells":
        return _Cells(self.x0[mask], self.x1[mask], self.y0[mask], self.y1[mask])

    def split(self) -> "_Cells":
        xm = 0.5 * (self.x0 + self.x1)
        ym = 0.5 * (self.y0 + self.y1)
        # children of cell i sit at 4i .. 4i+3
        x0 = np.stack([self.x0, xm, self.x0, xm], axis=1).ravel()
        x1 = np.stack([xm, self.x1, xm, self.x1], axis=1).ravel()
        y0 = np.stack([self.y0, self.y0, ym, ym], axis=1).ravel()
        y1 = np.stack([ym, ym, self.y1, self.y1], axis=1).ravel()
        return _Cells(x0, x1, y0, y1)

    @property
    def area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def distance_to(self, px: float, py: float) -> np.ndarray:
        dx = np.maximum(np.maximum(self.x0 - px, px - self.x1), 0.0)
        dy = np.maximum(np.maximum(self.y0 - py, py - self.y1), 0.0)
        return np.hypot(dx, dy)


def _bernstein(p: Poly2, cells: _Cells) -> np.ndarray:
    """Bernstein coefficients of ``p`` on each cell, shape ``(nc, dx+1, dy+1)``.

    ``p`` lies between the smallest and largest coefficient on the cell.
    """
    dx = max((a for a, _ in p.coeffs), default=0)
    dy = max((b for _, b in p.coeffs), default=0)
    C = np.zeros((dx + 1, dy + 1))
    for (a, b), c in p.coeffs.items():
        C[a, b] = c

    def shift(lo, h, d):
        # row a holds the coefficients of (lo + h s)^a in powers of s
        k = np.arange(d + 1)
        binom = np.array([[math.comb(a, j) for j in k] for a in k], dtype=float)
        expo = np.clip(k[:, None] - k[None, :], 0, None)
        with np.errstate(invalid="ignore"):
            lo_pow = np.where(k[:, None] >= k[None, :], lo[:, None, None] ** expo, 0.0)
        return binom * lo_pow * (h[:, None, None] ** k[None, None, :])

    Px = shift(cells.x0, cells.x1 - cells.x0, dx)
    Py = shift(cells.y0, cells.y1 - cells.y0, dy)
    A = np.einsum("nak,ab,nbl->nkl", Px, C, Py)

    def to_bernstein(d):
        k = np.arange(d + 1)
        return np.array([[math.comb(i, j) / math.comb(d, j) if j <= i else 0.0 for j in k] for i in k])

    return np.einsum("ik,nkl,jl->nij", to_bernstein(dx), A, to_bernstein(dy))


def _classify(cells: _Cells, constraints: Sequence[Poly2], refine: Sequence[Poly2]) -> np.ndarray:
    """Return 0 = outside, 1 = inside, 2 = boundary for each cell.

    The Bernstein coefficients bound each polynomial on the whole cell, so
    "inside" and "outside" are certified; every other cell is boundary.
    """
    n = len(cells)
    inside = np.ones(n, dtype=bool)
    outside = np.zeros(n, dtype=bool)
    for p in constraints:
        B = _bernstein(p, cells).reshape(n, -1)
        inside &= np.all(B > 0, axis=1)
        outside |= np.all(B <= 0, axis=1)
    for p in refine:
        B = _bernstein(p, cells).reshape(n, -1)
        inside &= np.all(B > 0, axis=1) | np.all(B < 0, axis=1)
    status = np.full(n, 2, dtype=np.int8)
    status[inside] = 1
    status[outside] = 0
    return status


def _tensor_nodes(cells: _Cells, n: int):
    t, w = gauss_legendre(n)
    hx = cells.x1 - cells.x0
    hy = cells.y1 - cells.y0
    x = cells.x0[:, None, None] + hx[:, None, None] * t[None, :, None]
    y = cells.y0[:, None, None] + hy[:, None, None] * t[None, None, :]
    x, y = np.broadcast_arrays(x, y)
    wt = (hx * hy)[:, None, None] * (w[:, None] * w[None, :])[None]
    return x.reshape(len(cells), -1), y.reshape(len(cells), -1), wt.reshape(len(cells), -1)


def _roots_in_interval(coefs: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
    """Real roots of each row polynomial (ascending coefficients) inside (t0, t1).

    Returns shape ``(L, deg)`` with NaN where there is no such root.
    """
    L, m = coefs.shape
    deg = m - 1
    out = np.full((L, max(deg, 0)), np.nan)
    if deg == 0:
        return out
    scale = np.max(np.abs(coefs), axis=1)
    scale[scale == 0] = 1.0
    c = coefs / scale[:, None]
    if deg == 1:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r = -c[:, 0] / c[:, 1]
        out[:, 0] = r
    elif deg == 2:
        a, b, cc = c[:, 2], c[:, 1], c[:, 0]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            disc = b * b - 4 * a * cc
            sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
            q = -0.5 * (b + np.copysign(sq, b))
            r1 = q / a
            r2 = cc / q
            lin = np.abs(a) <= 1e-14
            r_lin = -cc / b
        out[:, 0] = np.where(lin, r_lin, r1)
        out[:, 1] = np.where(lin, np.nan, r2)
    else:
        lead = c[:, -1].copy()
        tiny = np.abs(lead) < 1e-14
        lead[tiny] = 1e-14
        comp = np.zeros((L, deg, deg))
        comp[:, 1:, :-1] = np.eye(deg - 1)
        comp[:, :, -1] = -c[:, :-1] / lead[:, None]
        ev = np.linalg.eigvals(comp)
        re = ev.real
        ok = np.abs(ev.imag) <= 1e-9 * np.maximum(1.0, np.abs(re))
        # polish with a few Newton steps on the original polynomial
        for _ in range(2):
            pv = np.zeros_like(re)
            dv = np.zeros_like(re)
            for k in range(deg, -1, -1):
                dv = dv * re + pv
                pv = pv * re + c[:, k][:, None]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                step = np.where(dv != 0, pv / dv, 0.0)
            re = re - np.where(ok & np.isfinite(step), step, 0.0)
        out[:] = np.where(ok, re, np.nan)
    inside = (out > t0[:, None]) & (out < t1[:, None])
    return np.where(inside, out, np.nan)


def _line_nodes(cells: _Cells, n: int, constraints: Sequence[Poly2], refine: Sequence[Poly2]):
    """Nodes of the line rule; returns per-cell padded arrays ``(nc, m)``."""
    polys = list(constraints) + list(refine)
    nc = len(cells)
    cx = 0.5 * (cells.x0 + cells.x1)
    cy = 0.5 * (cells.y0 + cells.y1)
    # integrate along the axis that crosses the nearest zero set transversally
    along_y = np.ones(nc, dtype=bool)
    best = np.full(nc, np.inf)
    for p in polys:
        v = np.abs(p(cx, cy))
        gx = _partial(p, 0)(cx, cy)
        gy = _partial(p, 1)(cx, cy)
        g = np.hypot(gx, gy)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(g > 0, v / g, np.inf)
        closer = ratio < best
        best = np.where(closer, ratio, best)
        along_y = np.where(closer, np.abs(gy) >= np.abs(gx), along_y)

    t, w = gauss_legendre(n)
    nroots = sum(max(_deg_in(p, True), _deg_in(p, False)) for p in polys)
    nint = nroots + 1
    # outer direction is split where zero sets cross the two cell edges
    nsub = 2 * nroots + 1
    m = nsub * n * nint * n
    X = np.empty((nc, m))
    Yv = np.empty((nc, m))
    W = np.zeros((nc, m))
    for flag in (True, False):
        idx = np.nonzero(along_y == flag)[0]
        if idx.size == 0:
            continue
        if flag:
            s0, s1, t0, t1 = cells.x0[idx], cells.x1[idx], cells.y0[idx], cells.y1[idx]
        else:
            s0, s1, t0, t1 = cells.y0[idx], cells.y1[idx], cells.x0[idx], cells.x1[idx]
        k = idx.size
        sb = [np.full((k, 0), np.nan)]
        for p in polys:
            for edge in (t0, t1):
                coefs = p.line_coefficients(edge, along_y=not flag)
                sb.append(_roots_in_interval(coefs, s0, s1))
        sr = _pad_sorted(np.concatenate(sb, axis=1), nsub - 1, s1)
        sbr = np.concatenate([s0[:, None], sr, s1[:, None]], axis=1)
        sa, sbb = sbr[:, :-1], sbr[:, 1:]  # (k, nsub)
        s = sa[:, :, None] + (sbb - sa)[:, :, None] * t[None, None, :]  # (k, nsub, n)
        ws = (sbb - sa)[:, :, None] * w[None, None, :]
        L = k * nsub * n
        sf = s.ravel()
        t0l = np.repeat(t0, nsub * n)
        t1l = np.repeat(t1, nsub * n)
        roots = [np.full((L, 0), np.nan)]
        for p in polys:
            coefs = p.line_coefficients(sf, along_y=flag)
            roots.append(_roots_in_interval(coefs, t0l, t1l))
        r = _pad_sorted(np.concatenate(roots, axis=1), nroots, t1l)
        br = np.concatenate([t0l[:, None], r, t1l[:, None]], axis=1)  # (L, nint+1)
        a, b = br[:, :-1], br[:, 1:]
        mid = 0.5 * (a + b)
        keep = b > a
        for p in constraints:
            if flag:
                keep &= p(sf[:, None], mid) > 0
            else:
                keep &= p(mid, sf[:, None]) > 0
        tt = a[:, :, None] + (b - a)[:, :, None] * t[None, None, :]  # (L, nint, n)
        wt = np.where(keep, b - a, 0.0)[:, :, None] * w[None, None, :]
        wt = wt * ws.ravel()[:, None, None]
        ss = np.broadcast_to(sf[:, None, None], tt.shape)
        if flag:
            xx, yy = ss, tt
        else:
            xx, yy = tt, ss
        X[idx] = xx.reshape(k, m)
        Yv[idx] = yy.reshape(k, m)
        W[idx] = wt.reshape(k, m)
    return X, Yv, W


def _pad_sorted(r: np.ndarray, width: int, fill) -> np.ndarray:
    """Sort root rows, replacing NaN by ``fill`` and padding to ``width``."""
    fill = np.broadcast_to(np.asarray(fill, dtype=float)[..., None], (r.shape[0], 1))
    if r.shape[1] < width:
        r = np.concatenate([r, np.full((r.shape[0], width - r.shape[1]), np.nan)], axis=1)
    r = np.where(np.isnan(r), fill, r)
    r.sort(axis=1)
    return r


def _indicator_nodes(cells: _Cells, n: int, S: SemiAlgebraicSet):
    x, y, w = _tensor_nodes(cells, n)
    mask = np.ones(x.shape, dtype=bool)
    for p in S.constraints:
        mask &= p(x, y) > 0
    return x, y, np.where(mask, w, 0.0)


def _partial(p: Poly2, axis: int) -> Poly2:
    d = {}
    for (a, b), c in p.coeffs.items():
        if axis == 0 and a > 0:
            d[(a - 1, b)] = c * a
        elif axis == 1 and b > 0:
            d[(a, b - 1)] = c * b
    return Poly2(d)


def _deg_in(p: Poly2, along_y: bool) -> int:
    if p.is_zero:
        return 0
    return max((b if along_y else a) for a, b in p.coeffs)


def _apply(f: Integrand, x: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Per-cell sums ``sum_j w_j f(x_j, y_j)``; shape ``(nc, k)``.

    ``f`` is only evaluated at nodes with non-zero weight.
    """
    nc, m = w.shape
    sel = w.ravel() != 0
    xs = x.ravel()[sel]
    ys = y.ravel()[sel]
    if xs.size == 0:
        probe = np.atleast_1d(np.asarray(f(np.zeros(1), np.zeros(1))))
        k = 1 if probe.ndim == 1 else probe.shape[0]
        return np.zeros((nc, k), dtype=probe.dtype if np.iscomplexobj(probe) else float)
    vals = []
    chunk = max(1, _MAX_CHUNK_VALUES // 64)
    for i in range(0, xs.size, chunk):
        v = np.asarray(f(xs[i:i + chunk], ys[i:i + chunk]))
        if v.ndim == 0:
            v = np.full(xs[i:i + chunk].shape, v)
        if v.ndim == 1:
            v = v[None, :]
        vals.append(v)
    v = np.concatenate(vals, axis=1)
    k = v.shape[0]
    full = np.zeros((k, nc * m), dtype=v.dtype)
    full[:, sel] = v * w.ravel()[sel][None, :]
    return full.reshape(k, nc, m).sum(axis=2).T


def _evaluate(cells: _Cells, kinds: np.ndarray, f, S, cfg, refine) -> np.ndarray:
    """Cell integrals with the rule selected by ``kinds`` (1 tensor, 2 boundary)."""
    out = None
    n = cfg.gauss_order
    for kind in (1, 2):
        idx = np.nonzero(kinds == kind)[0]
        if idx.size == 0:
            continue
        sub = cells.take(idx)
        # chunk so the node arrays stay bounded
        per_cell = n * n * (1 + 12 * (kind == 2))
        step = max(1, _MAX_CHUNK_VALUES // (8 * per_cell))
        parts = []
        for i in range(0, idx.size, step):
            c = sub.take(slice(i, i + step))
            if kind == 1:
                x, y, w = _tensor_nodes(c, n)
            elif cfg.boundary_rule == "lines":
                x, y, w = _line_nodes(c, n, S.constraints, refine)
            else:
                x, y, w = _indicator_nodes(c, n, S)
            parts.append(_apply(f, x, y, w))
        vals = np.concatenate(parts, axis=0)
        if out is None:
            out = np.zeros((len(cells), vals.shape[1]), dtype=vals.dtype)
        elif np.iscomplexobj(vals) and not np.iscomplexobj(out):
            out = out.astype(complex)
        out[idx] = vals
    if out is None:
        out = np.zeros((len(cells), 1))
    return out


def integrate_region(
    f: Integrand,
    S: SemiAlgebraicSet,
    cfg: QuadratureConfig | None = None,
    refine: Sequence[Poly2] = (),
    vector: bool | None = None,
) -> QuadratureResult:
    """Integrate ``f`` over ``S``.

    ``f(x, y)`` receives 1-D arrays and returns either an array of the same
    length or a ``(k, npts)`` array for ``k`` integrands at once (the result
    value then has shape ``(k,)``; pass ``vector`` to skip the probe call
    that otherwise decides which).  Zero sets of the ``refine`` polynomials
    are treated like boundaries, which keeps kinks of ``f`` there resolved.
    """
    cfg = cfg or QuadratureConfig()
    refine = tuple(refine)
    x0, x1, y0, y1 = S.box
    root = _Cells(np.array([x0]), np.array([x1]), np.array([y0]), np.array([y1]))
    box_area = S.box_area

    status = _classify(root, S.constraints, refine)
    cells = root.take(status > 0)
    kinds = status[status > 0]
    q = _evaluate(cells, kinds, f, S, cfg, refine)

    total = None
    err = 0.0
    used = 0
    level = 0
    while len(cells):
        level += 1
        children = cells.split()
        ckinds = _classify(children, S.constraints, refine)
        qc = _evaluate(children, ckinds, f, S, cfg, refine)
        qsum = qc.reshape(len(cells), 4, -1).sum(axis=1)
        if qsum.shape[1] != q.shape[1]:
            width = max(qsum.shape[1], q.shape[1])
            qsum = np.broadcast_to(qsum, (len(cells), width))
            q = np.broadcast_to(q, (len(cells), width))
        diff = np.max(np.abs(qsum - q), axis=1)
        budget = cfg.tol * cells.area / box_area
        ok = (diff <= budget) & (level >= cfg.min_depth)
        if cfg.boundary_rule == "indicator":
            ok &= kinds == 1
        ok |= level >= cfg.max_depth
        acc = np.sum(qsum[ok], axis=0)
        total = acc if total is None else total + acc
        err += float(np.sum(diff[ok]))
        used += 4 * int(np.count_nonzero(ok))

        live = np.repeat(~ok, 4) & (ckinds > 0)
        cells = children.take(live)
        kinds = ckinds[live]
        q = qc[live]

    if total is None:
        total = np.zeros(1)
    if vector is None:
        vector = _is_vector(f)
    if vector:
        value = total
    else:
        v = total[0]
        value = complex(v) if np.iscomplexobj(v) else float(v)
    return QuadratureResult(value=value, error_estimate=err, cells_used=max(used, 1))


def _is_vector(f) -> bool:
    probe = np.asarray(f(np.array([0.0, 0.0]), np.array([0.0, 0.0])))
    return probe.ndim == 2


def fixed_rule(S: SemiAlgebraicSet, level: int = 5, gauss_order: int = 4):
    """Nodes and weights of a non-adaptive rule on a uniform ``2^level`` grid.

    Interior cells use tensor Gauss nodes and boundary cells the line rule,
    so polynomials of low degree are integrated over ``S`` almost exactly.
    """
    x0, x1, y0, y1 = S.box
    k = 2**level
    ex = np.linspace(x0, x1, k + 1)
    ey = np.linspace(y0, y1, k + 1)
    X0, Y0 = np.meshgrid(ex[:-1], ey[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(ex[1:], ey[1:], indexing="ij")
    cells = _Cells(X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel())
    st = _classify(cells, S.constraints, ())
    xs, ys, ws = [], [], []
    for kind in (1, 2):
        sub = cells.take(st == kind)
        if not len(sub):
            continue
        if kind == 1:
            x, y, w = _tensor_nodes(sub, gauss_order)
        else:
            x, y, w = _line_nodes(sub, gauss_order, S.constraints, ())
        keep = w != 0
        xs.append(x[keep])
        ys.append(y[keep])
        ws.append(w[keep])
    if not xs:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)


def compute_moments(S: SemiAlgebraicSet, N: int, cfg: QuadratureConfig | None = None) -> MomentVector:
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    res = integrate_region(lambda x, y: monomial_matrix(N, x, y), S, cfg, vector=True)
    return MomentVector(N, np.atleast_1d(np.asarray(res.value, dtype=float)))


def moments_with_error(S: SemiAlgebraicSet, N: int, cfg: QuadratureConfig | None = None):
    res = integrate_region(lambda x, y: monomial_matrix(N, x, y), S, cfg, vector=True)
    return MomentVector(N, np.atleast_1d(np.asarray(res.value, dtype=float))), res


def l1_norm(p: Poly2, K: SemiAlgebraicSet, cfg: QuadratureConfig | None = None) -> float:
    if p.is_zero:
        return 0.0
    return float(integrate_region(lambda x, y: np.abs(p(x, y)), K, cfg, refine=(p,)).value)


def positive_part_integral(p: Poly2, K: SemiAlgebraicSet, cfg: QuadratureConfig | None = None) -> float:
    if p.is_zero:
        return 0.0
    if p.degree == 0:
        c = p.coeffs.get((0, 0), 0.0)
        if c <= 0:
            return 0.0
    return float(integrate_region(lambda x, y: p(x, y), K.with_constraints(p), cfg).value)


def distance_lower_bound(S: SemiAlgebraicSet, z: complex, reach: float, max_depth: int = 30) -> float:
    """A lower bound on ``dist(z, S)``, exact to within ``reach / 4``.

    Cells farther than ``reach`` from ``z`` are pruned, so the return value
    is ``>= reach`` whenever the set stays that far away.
    """
    px, py = float(np.real(z)), float(np.imag(z))
    x0, x1, y0, y1 = S.box
    cells = _Cells(np.array([x0]), np.array([x1]), np.array([y0]), np.array([y1]))
    best = np.inf
    for _ in range(max_depth):
        st = _classify(cells, S.constraints, ())
        cells = cells.take(st > 0)
        kinds = st[st > 0]
        if not len(cells):
            return min(best, max(reach, 0.0)) if np.isfinite(best) else np.inf
        d = cells.distance_to(px, py)
        inside = kinds == 1
        if np.any(inside):
            best = min(best, float(d[inside].min()))
        diag = np.hypot(cells.x1 - cells.x0, cells.y1 - cells.y0)
        # boundary cells: the set touches them somewhere, so d is a lower bound
        near = (~inside) & (d < min(best, reach))
        if not np.any(near):
            break
        if np.all(diag[near] < reach / 4):
            best = min(best, float(d[near].min()))
            break
        cells = cells.take(near).split()
    return float(best)


__all__ = [
    "QuadratureConfig",
    "QuadratureResult",
    "compute_moments",
    "distance_lower_bound",
    "fixed_rule",
    "gauss_legendre",
    "integrate_region",
    "l1_norm",
    "multi_indices",
    "positive_part_integral",
]
