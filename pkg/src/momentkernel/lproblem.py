"""The truncated L-problem of moments on a planar semi-algebraic set K.

Given moments ``a_α`` for ``|α| <= N``, the questions are whether some
density ``0 <= φ <= 1`` (or ``|φ| <= L``) on K has these moments, how small
``L`` can be, which polynomial ``p`` describes an extremal solution
``χ_{K ∩ {p > 0}}``, and how far a further linear functional can move over
the feasible densities.

Linear programs run on a tensor midpoint grid of K's box (nodes outside K
dropped).  Integrals that decide acceptance, such as ``∫_K max(p, 0)`` and
moments of ``{p > 0}``, go through the adaptive quadrature engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .quadrature import QuadratureConfig, compute_moments, fixed_rule, positive_part_integral
from .semialgebraic import MomentVector, Poly2, SemiAlgebraicSet, moment_dimension, monomial_matrix
from .simplex import solve_lp


class ProblemError(ValueError):
    """A numerical precondition of an L-problem operation failed."""


@dataclass(frozen=True)
class LProblemConfig:
    grid: int = 200
    seed: int = 0
    solvable_tol: float = 1e-6
    krein_starts: int = 32
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError(f"grid resolution must be at least 2, got {self.grid}")


@dataclass(frozen=True)
class DensityGrid:
    """Midpoint nodes of K with their cell weights."""

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray

    @property
    def size(self) -> int:
        return self.x.size

    def moment_matrix(self, N: int) -> np.ndarray:
        """``(d, n)`` matrix with entries ``w_i x_i^α``."""
        return monomial_matrix(N, self.x, self.y) * self.w[None, :]

    def moments(self, phi: np.ndarray, N: int) -> MomentVector:
        return MomentVector(N, self.moment_matrix(N) @ phi)


def midpoint_grid(K: SemiAlgebraicSet, resolution: int = 200) -> DensityGrid:
    x0, x1, y0, y1 = K.box
    hx = (x1 - x0) / resolution
    hy = (y1 - y0) / resolution
    gx = x0 + hx * (np.arange(resolution) + 0.5)
    gy = y0 + hy * (np.arange(resolution) + 0.5)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    keep = K.indicator(X, Y)
    if not np.any(keep):
        raise ProblemError("no grid node lies inside K; refine the grid")
    return DensityGrid(X[keep], Y[keep], np.full(int(keep.sum()), hx * hy))


def _check_order(a: MomentVector, N: int | None = None) -> int:
    if N is not None and a.order != N:
        raise ValueError(f"moment vector has order {a.order}, expected {N}")
    return a.order


# --- normalizations --------------------------------------------------------


def normalize_bounds(
    a: MomentVector,
    K: SemiAlgebraicSet,
    L: float,
    inverse: bool = False,
    cfg: QuadratureConfig | None = None,
) -> MomentVector:
    """Moments of ``φ ∈ [0, L]`` to moments of ``2φ - L ∈ [-L, L]``, or back."""
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    mK = compute_moments(K, a.order, cfg).entries
    if inverse:
        return MomentVector(a.order, (a.entries + L * mK) / 2.0)
    return MomentVector(a.order, 2.0 * a.entries - L * mK)


def moments_of_sign(p: Poly2, K: SemiAlgebraicSet, N: int, cfg: QuadratureConfig | None = None) -> MomentVector:
    """Moments of ``sgn(p)`` on K."""
    if p.is_zero:
        raise ValueError("p must be non-zero")
    pos = compute_moments(K.with_constraints(p), N, cfg).entries
    neg = compute_moments(K.with_constraints(-p), N, cfg).entries
    return MomentVector(N, pos - neg)


def moments_of_positive_set(p: Poly2, K: SemiAlgebraicSet, N: int, cfg: QuadratureConfig | None = None) -> MomentVector:
    return compute_moments(K.with_constraints(p), N, cfg)


# --- critical bound -------------------------------------------------------


def critical_L(
    K: SemiAlgebraicSet,
    N: int,
    a: MomentVector,
    cfg: LProblemConfig | None = None,
    grid: DensityGrid | None = None,
) -> tuple[float, Poly2 | None]:
    """Smallest ``L`` for which some ``|φ| <= L`` on K has moments ``a``.

    Equals ``sup l_a(p) / ||p||_{1,K}``.  Solved through the LP dual
    ``max μ`` subject to ``Σ w_i x_i^α φ_i = μ a_α``, ``|φ_i| <= 1``; then
    ``L0 = 1/μ`` and the equality multipliers are the coefficients of the
    minimizer ``p_star`` of ``||p||_1`` under ``l_a(p) = 1``.
    """
    cfg = cfg or LProblemConfig()
    _check_order(a, N)
    scale = float(np.max(np.abs(a.entries)))
    if scale == 0:
        return 0.0, None
    # L0 is positively homogeneous, so solve for a unit-size vector
    av = a.entries / scale
    grid = grid or midpoint_grid(K, cfg.grid)
    G = grid.moment_matrix(N)
    nz = np.abs(av) > 0
    mu_cap = float(np.min(np.sum(np.abs(G), axis=1)[nz] / np.abs(av[nz]))) * 1.01 + 1.0
    A = np.hstack([G, -av[:, None]])
    c = np.zeros(grid.size + 1)
    c[-1] = -1.0
    lo = np.concatenate([-np.ones(grid.size), [0.0]])
    up = np.concatenate([np.ones(grid.size), [mu_cap]])
    res = solve_lp(c, A, np.zeros(moment_dimension(N)), lo, up)
    if not res.success:
        raise ProblemError(f"critical-L LP ended with status {res.status}")
    mu = res.x[-1]
    if mu <= 0:
        return float("inf"), None
    return float(scale / mu), Poly2.from_vector(res.duals / scale, N)


# --- Krein solvability margin ------------------------------------------------


def _sphere_starts(d: int, n_random: int, rng: np.random.Generator) -> np.ndarray:
    R = rng.standard_normal((d, n_random))
    R /= np.linalg.norm(R, axis=0, keepdims=True)
    E = np.hstack([np.eye(d), -np.eye(d)])
    return np.hstack([E, R])


def _grid_ascent(G: np.ndarray, a: np.ndarray, C: np.ndarray, steps: int = 300) -> tuple[np.ndarray, np.ndarray]:
    """Riemannian ascent of ``a·c - Σ w (Gᵀc)_+`` from every column of ``C``.

    ``G`` already carries the node weights.  Returns the best point found
    per start and its value.
    """
    monos = G
    best_c = C.copy()
    best_v = np.full(C.shape[1], -np.inf)
    c = C.copy()
    for t in range(steps):
        # G holds w_i x_i^α, so p_c(x_i) w_i = (Gᵀc)_i
        wp = monos.T @ c
        val = a @ c - np.sum(np.maximum(wp, 0.0), axis=0)
        better = val > best_v
        best_v = np.where(better, val, best_v)
        best_c[:, better] = c[:, better]
        grad = a[:, None] - monos @ (wp > 0)
        grad -= c * np.sum(grad * c, axis=0, keepdims=True)
        gn = np.linalg.norm(grad, axis=0, keepdims=True)
        gn[gn == 0] = 1.0
        c = c + (0.5 / np.sqrt(t + 1.0)) * grad / gn
        c /= np.linalg.norm(c, axis=0, keepdims=True)
    return best_c, best_v


@dataclass(frozen=True)
class KreinResult:
    margin: float
    maximizer: Poly2
    solvable: bool


def krein_search(
    K: SemiAlgebraicSet,
    N: int,
    a: MomentVector,
    cfg: LProblemConfig | None = None,
) -> KreinResult:
    """Maximize ``<a, c> - ∫_K max(p_c, 0)`` over unit coefficient vectors.

    A multi-start ascent on a coarse grid proposes candidates; the best few
    are scored with the adaptive quadrature engine, which fixes the
    reported margin.
    """
    cfg = cfg or LProblemConfig()
    _check_order(a, N)
    d = moment_dimension(N)
    rng = np.random.default_rng(cfg.seed)
    grid = midpoint_grid(K, min(cfg.grid, 100))
    G = grid.moment_matrix(N)
    C = _sphere_starts(d, cfg.krein_starts, rng)
    best_c, best_v = _grid_ascent(G, a.entries, C)
    order = np.argsort(-best_v, kind="stable")[: min(6, best_v.size)]
    # coordinate directions are always scored; they are exact for N = 0
    picks = list(dict.fromkeys(list(order) + list(range(2 * d))))
    margin = -np.inf
    arg = None
    for j in picks:
        cvec = best_c[:, j]
        p = Poly2.from_vector(cvec, N)
        v = float(a.entries @ cvec) - positive_part_integral(p, K, cfg.quadrature)
        if v > margin:
            margin, arg = v, cvec
    return KreinResult(float(margin), Poly2.from_vector(arg, N), bool(margin <= cfg.solvable_tol))


def krein_margin(K: SemiAlgebraicSet, N: int, a: MomentVector, cfg: LProblemConfig | None = None) -> float:
    return krein_search(K, N, a, cfg).margin


# --- generalized Chebyshev bounds ------------------------------------------


@dataclass(frozen=True)
class ChebyshevBounds:
    min_value: float
    max_value: float
    phi_min: np.ndarray
    phi_max: np.ndarray
    p_lower: Poly2
    p_upper: Poly2
    grid: DensityGrid


def _psi_values(psi, grid: DensityGrid) -> np.ndarray:
    v = np.asarray(psi(grid.x, grid.y), dtype=float)
    return np.broadcast_to(v, grid.x.shape).astype(float)


def chebyshev_bounds(
    K: SemiAlgebraicSet,
    N: int,
    a: MomentVector,
    psi: Callable[[np.ndarray, np.ndarray], np.ndarray],
    cfg: LProblemConfig | None = None,
    grid: DensityGrid | None = None,
) -> ChebyshevBounds:
    """Range of ``∫ ψ φ`` over densities ``0 <= φ <= 1`` with moments ``a``.

    ``phi_min``/``phi_max`` are the optimal grid densities; ``p_lower`` and
    ``p_upper`` are the LP multipliers as polynomials, so the optimal
    densities are indicators of ``{p_lower > ψ}`` and ``{ψ > p_upper}``
    away from ties.
    """
    cfg = cfg or LProblemConfig()
    _check_order(a, N)
    grid = grid or midpoint_grid(K, cfg.grid)
    G = grid.moment_matrix(N)
    cost = _psi_values(psi, grid) * grid.w
    lo = solve_lp(cost, G, a.entries, 0.0, 1.0)
    hi = solve_lp(-cost, G, a.entries, 0.0, 1.0)
    for r in (lo, hi):
        if not r.success:
            raise ProblemError(f"moments are not attainable on this grid (LP status {r.status})")
    return ChebyshevBounds(
        float(cost @ lo.x),
        float(cost @ hi.x),
        lo.x,
        hi.x,
        Poly2.from_vector(lo.duals, N),
        Poly2.from_vector(-hi.duals, N),
        grid,
    )


# --- extremal reconstruction --------------------------------------------------


@dataclass(frozen=True)
class ExtremalSolution:
    p: Poly2
    critical_L: float
    moment_residual: float
    converged: bool
    variant: str = "unit"


def _sigmoid(s):
    return 0.5 * (1.0 + np.tanh(0.5 * s))


def _tangent_basis(c: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of ``c`` (columns)."""
    d = c.size
    Q, _ = np.linalg.qr(np.hstack([c[:, None], np.eye(d)]))
    return Q[:, 1:d]


def _lm_step(J: np.ndarray, r: np.ndarray, lam: float) -> np.ndarray:
    JtJ = J.T @ J
    return np.linalg.solve(JtJ + lam * (np.trace(JtJ) / max(JtJ.shape[0], 1) + 1e-300) * np.eye(JtJ.shape[0]), -J.T @ r)


def _smoothed_continuation(c, target, x, y, w, N, eps_schedule, max_iter):
    M = monomial_matrix(N, x, y)
    Mw = M * w[None, :]
    for eps in eps_schedule:
        lam = 1e-3
        for _ in range(max_iter):
            p = c @ M
            s = _sigmoid(p / eps)
            r = Mw @ s - target
            ds = s * (1.0 - s) / eps
            J = (Mw * ds[None, :]) @ M.T
            Q = _tangent_basis(c)
            step = Q @ _lm_step(J @ Q, r, lam)
            cand = c + step
            cand /= np.linalg.norm(cand)
            r_new = Mw @ _sigmoid((cand @ M) / eps) - target
            if np.linalg.norm(r_new) < np.linalg.norm(r):
                c = cand
                lam = max(lam / 3.0, 1e-12)
                if np.linalg.norm(step) < 1e-12:
                    break
            else:
                lam *= 4.0
                if lam > 1e8:
                    break
    return c


def _hard_moments(c, K, N, qcfg):
    p = Poly2.from_vector(c, N)
    if p.is_zero:
        return np.zeros(moment_dimension(N))
    return compute_moments(K.with_constraints(p), N, qcfg).entries


def _hard_polish(c, target, K, N, qcfg, max_iter=60, h=1e-5):
    r = _hard_moments(c, K, N, qcfg) - target
    lam = 1e-6
    for _ in range(max_iter):
        if np.linalg.norm(r) < 1e-13:
            break
        Q = _tangent_basis(c)
        cols = []
        for k in range(Q.shape[1]):
            up = c + h * Q[:, k]
            dn = c - h * Q[:, k]
            cols.append((_hard_moments(up / np.linalg.norm(up), K, N, qcfg) - _hard_moments(dn / np.linalg.norm(dn), K, N, qcfg)) / (2 * h))
        J = np.array(cols).T if cols else np.zeros((r.size, 0))
        improved = False
        for _ in range(8):
            step = Q @ _lm_step(J, r, lam)
            cand = c + step
            cand /= np.linalg.norm(cand)
            r_new = _hard_moments(cand, K, N, qcfg) - target
            if np.linalg.norm(r_new) < np.linalg.norm(r):
                c, r = cand, r_new
                lam = max(lam / 10.0, 1e-14)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
    return c, r


def extremal_reconstruct(
    K: SemiAlgebraicSet,
    N: int,
    a_target: MomentVector,
    cfg: LProblemConfig | None = None,
    variant: str = "unit",
    L: float = 1.0,
    residual_threshold: float = 1e-6,
) -> ExtremalSolution:
    """Find ``p`` of degree ``<= N`` whose positive set reproduces ``a_target``.

    ``variant="unit"`` reads ``a_target`` as moments of ``χ_{K∩{p>0}}``;
    ``variant="sign"`` reads it as moments of ``L·sgn(p)``.  The start is the
    maximizer of the Krein functional (for a boundary point of the moment
    body it is the normal of the supporting hyperplane), followed by a
    smoothed-indicator continuation and a Newton polish on the exact
    moments of ``{p > 0}``.  ``p`` is returned with unit coefficient norm;
    its sign is part of the answer and is not normalized away.
    """
    cfg = cfg or LProblemConfig()
    _check_order(a_target, N)
    if variant not in ("unit", "sign"):
        raise ValueError(f"unknown variant {variant!r}")
    qcfg = cfg.quadrature
    mK = compute_moments(K, N, qcfg).entries
    if variant == "sign":
        target = (a_target.entries / L + mK) / 2.0
    else:
        target = a_target.entries.copy()

    start = krein_search(K, N, MomentVector(N, target), cfg).maximizer.to_vector(N)
    start /= np.linalg.norm(start)
    x, y, w = fixed_rule(K, level=5, gauss_order=4)
    eps = 0.5 * (1e-3 / 0.5) ** (np.arange(10) / 9.0)
    c = _smoothed_continuation(start, target, x, y, w, N, eps, 50)
    c, r = _hard_polish(c, target, K, N, qcfg)
    scale = 2.0 * L if variant == "sign" else 1.0
    if scale * np.linalg.norm(r) > residual_threshold:
        # the continuation can drift to a poor basin; retry from the start
        c2, r2 = _hard_polish(start, target, K, N, qcfg)
        if np.linalg.norm(r2) < np.linalg.norm(r):
            c, r = c2, r2

    residual = float(scale * np.linalg.norm(r))
    p = Poly2.from_vector(c / np.linalg.norm(c), N)
    sign_vec = MomentVector(N, 2.0 * target - mK)
    try:
        L0, _ = critical_L(K, N, sign_vec, cfg, grid=midpoint_grid(K, min(cfg.grid, 100)))
    except ProblemError:
        L0 = float("nan")
    if variant == "sign":
        L0 *= L
    return ExtremalSolution(p, float(L0), residual, residual <= residual_threshold, variant)


def canonical_sign(p: Poly2, N: int) -> Poly2:
    """``p`` scaled to unit norm with its first non-zero coefficient positive."""
    v = p.to_vector(N)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return p
    v = v / nrm
    nz = np.nonzero(np.abs(v) > 1e-14)[0]
    if nz.size and v[nz[0]] < 0:
        v = -v
    return Poly2.from_vector(v, N)


# --- zero-set geometry ---------------------------------------------------


def zero_set_points(p: Poly2, K: SemiAlgebraicSet, resolution: int = 400) -> np.ndarray:
    """Points of ``{p = 0} ∩ K`` from sign changes along grid edges."""
    x0, x1, y0, y1 = K.box
    gx = np.linspace(x0, x1, resolution + 1)
    gy = np.linspace(y0, y1, resolution + 1)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    V = p(X, Y)
    pts = []
    for axis in (0, 1):
        a = np.take(V, np.arange(V.shape[axis] - 1), axis=axis)
        b = np.take(V, np.arange(1, V.shape[axis]), axis=axis)
        xa = np.take(X, np.arange(X.shape[axis] - 1), axis=axis)
        xb = np.take(X, np.arange(1, X.shape[axis]), axis=axis)
        ya = np.take(Y, np.arange(Y.shape[axis] - 1), axis=axis)
        yb = np.take(Y, np.arange(1, Y.shape[axis]), axis=axis)
        hit = (a == 0) | (a * b < 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(a[hit] == b[hit], 0.0, a[hit] / (a[hit] - b[hit]))
        pts.append(np.stack([xa[hit] + t * (xb[hit] - xa[hit]), ya[hit] + t * (yb[hit] - ya[hit])], axis=1))
    P = np.concatenate(pts, axis=0)
    if P.size == 0:
        return P.reshape(0, 2)
    inside = np.ones(len(P), dtype=bool)
    for q in K.constraints:
        inside &= q(P[:, 0], P[:, 1]) >= 0
    return P[inside]


def hausdorff_distance(P: np.ndarray, Q: np.ndarray) -> float:
    if len(P) == 0 or len(Q) == 0:
        return float("inf")
    return float(max(directed_hausdorff(P, Q)[0], directed_hausdorff(Q, P)[0]))


def sign_agreement(p: Poly2, q: Poly2, grid: DensityGrid) -> float:
    """Fraction of grid nodes where ``p`` and ``q`` have the same sign."""
    return float(np.mean(np.sign(p(grid.x, grid.y)) == np.sign(q(grid.x, grid.y))))
