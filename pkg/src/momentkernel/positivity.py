"""Positivity of the exponential kernel and the operator it encodes.

For a kernel ``E(z, w̄)`` of a shape inside the unit disk, the four-point
function

    F(z1, z̄2; w1, w̄2) = [E(z1,w̄2) E(w1,z̄2) - E(z1,z̄2) E(w1,w̄2)]
                         / [(w1 - z1)(w̄2 - z̄2) E(z1,w̄2)]

is a Gram kernel ``<ρ(z1, z̄2), ρ(w2, w̄1)>`` with
``ρ(z1, z̄2) = (T - z1)^{-1} (T* - z̄2)^{-1} ξ`` for a contraction ``T`` whose
self-commutator is ``ξ ⊗ ξ``.  This module samples F, checks positivity,
factors the Gram matrix and rebuilds finite compressions of ``T`` and ``ξ``.

Kernels are callables ``E(z, w)`` returning ``E(z, w̄)`` (the conjugation of
the second point happens inside) and broadcasting over arrays.  They also
expose ``complement(z, w) = 1 - E(z, w̄)``, evaluated without cancellation
where possible.  Limits at infinity are taken in inverted coordinates
``u = 1/z`` as the mean over ``M`` points of a circle ``|u| = ε``; for a
function analytic near 0 this equals the value at 0 up to ``O(ε^M)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kernel import annulus_kernel, eval_kernel_numeric
from .quadrature import QuadratureConfig
from .semialgebraic import SemiAlgebraicSet


# --- kernels -------------------------------------------------------------


class KernelFunction:
    """Base class: ``E(z, w)`` means ``E(z, w̄)``."""

    def complement(self, z, w):
        raise NotImplementedError

    def __call__(self, z, w):
        return 1.0 - self.complement(z, w)


@dataclass(frozen=True)
class DiskKernel(KernelFunction):
    radius: float = 1.0

    def complement(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return self.radius**2 / (z * np.conj(w))


@dataclass(frozen=True)
class AnnulusKernel(KernelFunction):
    """Centred annulus; the evaluation points must avoid the closed annulus."""

    r: float
    R: float

    def complement(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        p = z * np.conj(w)
        outside = (np.abs(z) > self.R) & (np.abs(w) > self.R)
        with np.errstate(divide="ignore", invalid="ignore"):
            c_out = (self.R**2 - self.r**2) / (p - self.r**2)
        return np.where(outside, c_out, 1.0 - annulus_kernel(z, w, self.r, self.R))


@dataclass(frozen=True)
class UnitKernel(KernelFunction):
    """``E ≡ 1``: the kernel of the empty shape."""

    def complement(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        return np.zeros(z.shape, dtype=complex)


@dataclass(frozen=True)
class PerturbedKernel(KernelFunction):
    """``E + delta / (z w̄)^power``; not the kernel of any shape for most ``delta``."""

    base: KernelFunction
    delta: float
    power: int = 2

    def complement(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return self.base.complement(z, w) - self.delta / (z * np.conj(w)) ** self.power


class NumericKernel(KernelFunction):
    """Kernel of a semi-algebraic set by quadrature, batched and cached."""

    def __init__(self, S: SemiAlgebraicSet, cfg: QuadratureConfig | None = None):
        self.S = S
        self.cfg = cfg or QuadratureConfig()
        self._cache: dict[tuple[complex, complex], complex] = {}

    def complement(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        keys = list(zip(z.ravel().tolist(), w.ravel().tolist()))
        todo = sorted({k for k in keys if k not in self._cache}, key=lambda k: (k[0].real, k[0].imag, k[1].real, k[1].imag))
        if todo:
            zs = np.array([k[0] for k in todo])
            ws = np.array([k[1] for k in todo])
            # 1 - exp(-I/π) through expm1 keeps small complements accurate
            vals, _ = eval_kernel_numeric(self.S, zs, ws, self.cfg)
            comp = -np.expm1(np.log(vals))
            self._cache.update(zip(todo, comp.tolist()))
        return np.array([self._cache[k] for k in keys], dtype=complex).reshape(z.shape)


# --- F and G -----------------------------------------------------------------


def _F_raw(E: KernelFunction, z1, z2, w1, w2):
    a = E.complement(z1, w2)
    b = E.complement(w1, z2)
    c = E.complement(z1, z2)
    d = E.complement(w1, w2)
    # E(z1,w̄2)E(w1,z̄2) - E(z1,z̄2)E(w1,w̄2) with E = 1 - K
    num = (c - a) + (d - b) + (a * b - c * d)
    return num / ((w1 - z1) * np.conj(w2 - z2) * (1.0 - a))


def build_F(E: KernelFunction, z1, z2, w1, w2, h: float = 1e-4):
    """The four-point function; coincident arguments use the derivative limit.

    Where ``w1 = z1`` (or ``w2 = z2``) the value is the symmetric mean of F at
    ``w1 ± h|z1|``, extrapolated once (Richardson, steps ``h`` and ``h/2``).
    """
    z1, z2, w1, w2 = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (z1, z2, w1, w2)))
    scale = np.maximum(1.0, np.maximum(np.abs(z1), np.abs(z2)))
    deg1 = np.abs(w1 - z1) <= 1e-12 * scale
    deg2 = np.abs(w2 - z2) <= 1e-12 * scale
    out = np.empty(z1.shape, dtype=complex)
    ok = ~(deg1 | deg2)
    if np.any(ok):
        out[ok] = _F_raw(E, z1[ok], z2[ok], w1[ok], w2[ok])
    bad = ~ok
    if np.any(bad):
        a1, a2, b1, b2 = z1[bad], z2[bad], w1[bad], w2[bad]
        s1 = np.where(deg1[bad], h * np.maximum(1.0, np.abs(a1)), 0.0)
        s2 = np.where(deg2[bad], h * np.maximum(1.0, np.abs(a2)), 0.0)

        def sym(step):
            vals = [
                _F_raw(E, a1, a2, b1 + e1 * step * s1, b2 + e2 * step * s2)
                for e1 in (-1, 1)
                for e2 in (-1, 1)
            ]
            return sum(vals) / 4.0

        out[bad] = (4.0 * sym(0.5) - sym(1.0)) / 3.0
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class LimitRule:
    """Circle-mean rule for values at ``u = 0``."""

    eps: float = 1e-2
    points: int = 8

    def nodes(self) -> np.ndarray:
        return self.eps * np.exp(2j * np.pi * np.arange(self.points) / self.points)


def _G_nonzero(E, u1, u2, v1, v2, h):
    F = build_F(E, 1.0 / u1, 1.0 / u2, 1.0 / v1, 1.0 / v2, h)
    return F / (u1 * np.conj(v2))


def build_G(E: KernelFunction, u1, u2, v1, v2, rule: LimitRule = LimitRule(), h: float = 1e-4):
    """``G(u1, ū2; v1, v̄2) = z1 w̄2 F(z1, z̄2; w1, w̄2)`` with ``z = 1/u``, ``w = 1/v``.

    Zero coordinates (points at infinity) are handled by circle means.
    """
    args = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (u1, u2, v1, v2)))
    shape = args[0].shape
    flat = [a.ravel() for a in args]
    out = np.zeros(flat[0].size, dtype=complex)
    nodes = rule.nodes()
    zero = np.stack([f == 0 for f in flat])  # (4, n)
    patterns = {}
    for i in range(flat[0].size):
        patterns.setdefault(tuple(zero[:, i]), []).append(i)
    for pat, idx in patterns.items():
        idx = np.array(idx)
        cols = [f[idx] for f in flat]
        k = sum(pat)
        if k == 0:
            out[idx] = _G_nonzero(E, *cols, h)
            continue
        # tensor product of circle nodes over the zero coordinates
        mesh = np.meshgrid(*[nodes] * k, indexing="ij")
        mesh = [m.ravel() for m in mesh]
        it = iter(mesh)
        expanded = []
        for c, z in zip(cols, pat):
            if z:
                expanded.append(next(it)[None, :] + 0 * c[:, None])
            else:
                expanded.append(np.repeat(c[:, None], mesh[0].size, axis=1))
        vals = _G_nonzero(E, *expanded, h)
        out[idx] = vals.mean(axis=1)
    return out.reshape(shape) if shape else complex(out[0])


# --- Gram matrices ----------------------------------------------------------


Points = Sequence[tuple[complex, complex]]


def _pair_arrays(points: Points):
    P = np.asarray(points, dtype=complex).reshape(-1, 2)
    return P[:, 0], P[:, 1]


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    points: np.ndarray

    @property
    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T))) if self.entries.size else 0.0


def gram_matrix(E: KernelFunction, points: Points, h: float = 1e-4) -> GramMatrix:
    """``A_kl = F(s_k, t̄_k; t_l, s̄_l) = <ρ(s_k, t̄_k), ρ(s_l, t̄_l)>``."""
    s, t = _pair_arrays(points)
    S1, S2 = np.meshgrid(s, s, indexing="ij")
    T1, T2 = np.meshgrid(t, t, indexing="ij")
    A = build_F(E, S1, T1, T2, S2, h)
    return GramMatrix(np.asarray(A, dtype=complex), np.stack([s, t], axis=1))


def cross_gram(E: KernelFunction, rows: Points, cols: Points, h: float = 1e-4) -> np.ndarray:
    """``<ρ(row), ρ(col)>`` for two point lists."""
    s, t = _pair_arrays(rows)
    sc, tc = _pair_arrays(cols)
    return np.asarray(build_F(E, s[:, None], t[:, None], tc[None, :], sc[None, :], h), dtype=complex)


def _g_gram_parts(E, points, rule, h):
    """G, G(0, .), G(., 0), G(0, 0) in the first coordinates, over pairs of points."""
    s, t = _pair_arrays(points)
    u1 = (1.0 / s)[:, None]
    u2 = (1.0 / t)[:, None]
    v1 = (1.0 / t)[None, :]
    v2 = (1.0 / s)[None, :]
    zero = np.zeros((len(s), len(s)), dtype=complex)
    G = build_G(E, u1 + zero, u2 + zero, v1 + zero, v2 + zero, rule, h)
    G0_ = build_G(E, zero, u2 + zero, v1 + zero, v2 + zero, rule, h)
    G_0 = build_G(E, u1 + zero, u2 + zero, v1 + zero, zero, rule, h)
    G00 = build_G(E, zero, u2 + zero, v1 + zero, zero, rule, h)
    return G, G0_, G_0, G00, u1 + zero, v2 + zero


def psd_gram_check(A, tol: float = 1e-8, herm_tol: float = 1e-9) -> tuple[bool, float]:
    """``(λ_min >= -tol, λ_min)`` for a Hermitian matrix."""
    M = A.entries if isinstance(A, GramMatrix) else np.asarray(A, dtype=complex)
    if M.size == 0:
        return True, 0.0
    asym = float(np.max(np.abs(M - M.conj().T)))
    scale = max(1.0, float(np.max(np.abs(M))))
    if asym > herm_tol * scale:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
    lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return bool(lam[0] >= -tol), float(lam[0])


@dataclass(frozen=True)
class SandwichReport:
    lower_psd: bool
    upper_psd: bool
    lambda_min_lower: float
    lambda_min_upper: float


def sandwich_check(
    E: KernelFunction,
    points: Points,
    tol: float = 1e-8,
    rule: LimitRule = LimitRule(),
    h: float = 1e-4,
) -> SandwichReport:
    """PSD status of ``Δ_{u1} Δ_{v̄2} G`` and of ``G - Δ_{u1} Δ_{v̄2} G``.

    ``Δ_u h = (h(u) - h(0)) / u`` is the difference quotient at zero.
    """
    G, G0_, G_0, G00, u1, v2 = _g_gram_parts(E, points, rule, h)
    DD = (G - G0_ - G_0 + G00) / (u1 * np.conj(v2))
    M1 = 0.5 * (DD + DD.conj().T)
    M2 = 0.5 * ((G - DD) + (G - DD).conj().T)
    ok1, l1 = psd_gram_check(M1, tol, herm_tol=np.inf)
    ok2, l2 = psd_gram_check(M2, tol, herm_tol=np.inf)
    return SandwichReport(ok1, ok2, l1, l2)


# --- factorization ----------------------------------------------------------


@dataclass(frozen=True)
class RhoFactor:
    """``A ≈ R Rᴴ``; row ``k`` of ``vectors`` is ``ρ_k``."""

    vectors: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    reconstruction_error: float

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def extend(self, cross: np.ndarray) -> np.ndarray:
        """Coordinates of new vectors from their inner products with the ``ρ_k``.

        ``cross[k, i] = <ρ_new_i, ρ_k>``; returns rows ``ρ_new_i``.
        """
        return (cross.T @ self.eigenvectors) / np.sqrt(self.eigenvalues)[None, :]


def kolmogorov_factorize(A, tol: float = 1e-8, rel_cut: float = 1e-12) -> RhoFactor:
    """Vectors ``ρ_k`` with ``<ρ_k, ρ_l> = A_kl`` from an eigendecomposition."""
    M = A.entries if isinstance(A, GramMatrix) else np.asarray(A, dtype=complex)
    n = M.shape[0]
    if n == 0:
        return RhoFactor(np.zeros((0, 0), dtype=complex), np.zeros(0), np.zeros((0, 0), dtype=complex), 0.0)
    H = 0.5 * (M + M.conj().T)
    lam, U = np.linalg.eigh(H)
    if lam[0] < -tol * max(1.0, abs(lam[-1])):
        raise ValueError(f"matrix is indefinite: smallest eigenvalue {lam[0]:.3g}")
    top = max(lam[-1], 0.0)
    keep = lam > rel_cut * top if top > 0 else np.zeros(n, dtype=bool)
    lam_k = lam[keep][::-1]
    U_k = U[:, keep][:, ::-1]
    R = U_k * np.sqrt(lam_k)[None, :]
    err = float(np.max(np.abs(R @ R.conj().T - M))) if n else 0.0
    return RhoFactor(R, lam_k, U_k, err)


# --- operator reconstruction ---------------------------------------------------


@dataclass(frozen=True)
class ReconstructionConfig:
    limit: LimitRule = field(default_factory=LimitRule)
    rank_cut: float = 1e-12
    psd_tol: float = 1e-8
    diff_step: float = 1e-4
    max_condition: float = 1e14


@dataclass(frozen=True)
class FiniteOperator:
    T: np.ndarray
    xi: np.ndarray
    factor: RhoFactor | None = None
    points: np.ndarray | None = None
    base_count: int = 0
    kernel: KernelFunction | None = None
    cfg: ReconstructionConfig | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.T.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.T, 2)) if self.T.size else 0.0

    def commutator(self) -> np.ndarray:
        return self.T.conj().T @ self.T - self.T @ self.T.conj().T

    def rho(self, points: Points) -> np.ndarray:
        """``ρ`` at new points as rows, by extension from the sampled span."""
        if self.factor is None:
            s, t = _pair_arrays(points)
            return self.resolvent_rho(s, t)
        cross = cross_gram(self.kernel, self.points, points, self.cfg.diff_step)
        return self.factor.extend(cross.conj())

    def resolvent_rho(self, z1, z2) -> np.ndarray:
        """``(T - z1)^{-1} (T* - z̄2)^{-1} ξ`` for each pair, as rows."""
        n = self.dimension
        I = np.eye(n)
        Th = self.T.conj().T
        rows = []
        for a, b in zip(np.atleast_1d(z1), np.atleast_1d(z2)):
            inner = np.linalg.solve(Th - np.conj(b) * I, self.xi)
            rows.append(np.linalg.solve(self.T - a * I, inner))
        return np.array(rows)


def shift_operator(n: int) -> FiniteOperator:
    """Truncated unilateral shift with ``ξ = e_0``, the disk's model operator."""
    T = np.diag(np.ones(n - 1, dtype=complex), -1)
    xi = np.zeros(n, dtype=complex)
    xi[0] = 1.0
    return FiniteOperator(T, xi)


def default_sample_points(n: int = 20, radii: tuple[float, float] = (1.5, 2.5)) -> list[tuple[complex, complex]]:
    """Pairs ``(s, t)`` with ``s`` and ``t`` on two circles at equispaced angles."""
    ang = 2 * np.pi * np.arange(n) / n
    s = radii[0] * np.exp(1j * ang)
    t = radii[1] * np.exp(1j * (ang + np.pi / n))
    return list(zip(s.tolist(), t.tolist()))


def reconstruct_operator(
    E: KernelFunction,
    points: Points,
    cfg: ReconstructionConfig | None = None,
) -> FiniteOperator:
    """Finite compression of ``T`` and the vector ``ξ`` from kernel samples.

    The sampled pairs are augmented by companions ``(1/u, t)`` with ``u`` on
    the limit circle, one set per pair, and by a grid with both coordinates
    on it.  The Gram matrix of all points is factored; then
    ``T ρ(z1, z̄2) = z1 ρ(z1, z̄2) - lim z1 ρ(z1, z̄2)`` (limit ``z1 → ∞``) is
    known on every augmented point and ``T`` is the least-squares solution
    over all of them.  ``ξ`` is the double limit of ``z1 z̄2 ρ(z1, z̄2)``.
    """
    cfg = cfg or ReconstructionConfig()
    s, t = _pair_arrays(points)
    n = s.size
    nodes = cfg.limit.nodes()
    M = nodes.size
    inv = 1.0 / nodes
    comp = np.stack([np.tile(inv, n), np.repeat(t, M)], axis=1)
    I, J = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    dbl = np.stack([inv[I.ravel()], inv[J.ravel()]], axis=1)
    allp = np.vstack([np.stack([s, t], axis=1), comp, dbl])

    A = gram_matrix(E, allp, cfg.diff_step)
    fac = kolmogorov_factorize(A, cfg.psd_tol, cfg.rank_cut)
    R = fac.vectors  # rows ρ at every augmented point
    r = fac.dimension
    cond = float(fac.eigenvalues[0] / fac.eigenvalues[-1]) if r else 0.0
    if cond > cfg.max_condition:
        raise ValueError(f"sampled span is ill-conditioned (condition {cond:.3g})")

    rho_b = R[:n]
    rho_c = R[n : n + n * M].reshape(n, M, r)
    rho_d = R[n + n * M :].reshape(M, M, r)
    # lim z1 ρ(z1, ·) = mean over the circle of ρ(1/u, ·) / u
    ell_b = np.mean(rho_c / nodes[None, :, None], axis=1)
    ell_d = np.mean(rho_d / nodes[:, None, None], axis=0)  # indexed by second coordinate
    Y = np.vstack(
        [
            s[:, None] * rho_b - ell_b,
            (inv[None, :, None] * rho_c - ell_b[:, None, :]).reshape(n * M, r),
            (inv[:, None, None] * rho_d - ell_d[None, :, :]).reshape(M * M, r),
        ]
    )
    # rows: Y = R Tᵀ  =>  Tᵀ = R⁺ Y
    Tt, *_ = np.linalg.lstsq(R, Y, rcond=None)
    T = Tt.T
    # ξ = lim z1 z̄2 ρ: ρ is anti-analytic in z2, so ū2 also sweeps the circle
    xi = np.mean(rho_d / (nodes[:, None, None] * np.conj(nodes)[None, :, None]), axis=(0, 1))

    Th = T.conj().T
    # ξ again from (T* - t̄) ℓ(t) = -ξ, one estimate per sampled pair
    xi_alt = -(ell_b @ Th.T - np.conj(t)[:, None] * ell_b)
    diag = {
        "span_dimension": r,
        "condition": cond,
        "factor_error": fac.reconstruction_error,
        "fit_residual": float(np.max(np.abs(R @ Tt - Y), initial=0.0)),
        "xi_consistency": float(np.max(np.abs(xi_alt - xi[None, :]), initial=0.0)),
        "augmented_points": int(allp.shape[0]),
    }
    return FiniteOperator(T, xi, fac, allp, n, E, cfg, diag)


def commutator_on_samples(op: FiniteOperator) -> np.ndarray:
    """``<[T*, T] ρ_k, ρ_l>`` over the sampled pairs (rank one in theory)."""
    rho = op.factor.vectors[: op.base_count]
    Tr = rho @ op.T.T
    Tsr = rho @ op.T.conj()
    return Tr @ Tr.conj().T - Tsr @ Tsr.conj().T


@dataclass(frozen=True)
class CommutatorReport:
    ratio_on_samples: float
    singular_values_on_samples: np.ndarray
    full_singular_values: np.ndarray
    action_residual: float


def commutator_report(op: FiniteOperator) -> CommutatorReport:
    """Rank-one structure of the self-commutator.

    ``ratio_on_samples`` is ``σ2/σ1`` of the sampled matrix
    ``<[T*, T] ρ_k, ρ_l>``.  The full commutator of a finite matrix has trace
    zero and therefore cannot be rank one; its singular values are reported
    for reference.  ``action_residual`` is the largest deviation of
    ``[T*, T] ρ`` from ``<ρ, ξ> ξ`` over the samples.
    """
    C = commutator_on_samples(op)
    sv = np.linalg.svd(C, compute_uv=False)
    ratio = float(sv[1] / sv[0]) if sv.size > 1 and sv[0] > 0 else 0.0
    rho = op.factor.vectors[: op.base_count]
    act = rho @ op.commutator().T
    want = (rho @ op.xi.conj())[:, None] * op.xi[None, :]
    return CommutatorReport(
        ratio,
        sv,
        np.linalg.svd(op.commutator(), compute_uv=False),
        float(np.max(np.abs(act - want), initial=0.0)),
    )


@dataclass(frozen=True)
class IdentityReport:
    kernel_formula: float
    inverse_formula: float
    rho_formula: float
    rho_xi_pairing: float


def verify_determinantal_identity(
    op: FiniteOperator,
    E: KernelFunction,
    holdout: Points,
) -> IdentityReport:
    """Residuals of the resolvent identities on held-out pairs ``(z, w)``.

    * ``E(z, w̄) = 1 - <(T* - w̄)^{-1} ξ, (T* - z̄)^{-1} ξ>``
    * ``1 + <(T* - ū)^{-1} (T - v)^{-1} ξ, ξ> = 1 / E(v, ū)`` with ``(v, u) = (z, w)``
    * ``ρ(z, w̄) = (T - z)^{-1} (T* - w̄)^{-1} ξ`` against the sampled extension
    * ``<ρ(z, w̄), ξ> = 1 - E(z, w̄)``
    """
    z, w = _pair_arrays(holdout)
    T, xi = op.T, op.xi
    n = op.dimension
    I = np.eye(n)
    Th = T.conj().T
    e12 = e15 = 0.0
    for a, b in zip(z, w):
        Ew = complex(E(a, b))
        x_w = np.linalg.solve(Th - np.conj(b) * I, xi)
        x_z = np.linalg.solve(Th - np.conj(a) * I, xi)
        e12 = max(e12, abs((1.0 - np.vdot(x_z, x_w)) - Ew))
        y = np.linalg.solve(Th - np.conj(b) * I, np.linalg.solve(T - a * I, xi))
        e15 = max(e15, abs((1.0 + np.vdot(xi, y)) - 1.0 / Ew))
    res_rho = op.resolvent_rho(z, w)
    ext = op.rho(np.stack([z, w], axis=1))
    e20 = float(np.max(np.abs(res_rho - ext), initial=0.0))
    pairing = ext @ xi.conj()
    e_pair = float(np.max(np.abs(pairing - E.complement(z, w))))
    return IdentityReport(float(e12), float(e15), e20, e_pair)


# --- interpolation data ------------------------------------------------------


@dataclass(frozen=True)
class InterpolationData:
    """``b[m, n]`` for ``m + n <= N`` (zero elsewhere) and an instability estimate."""

    b: np.ndarray
    order: int
    instability: float

    def to_json(self) -> dict:
        N = self.order
        return {
            "order": N,
            "b": [
                {"m": m, "n": n, "re": float(self.b[m, n].real), "im": float(self.b[m, n].imag)}
                for m in range(N + 1)
                for n in range(N + 1 - m)
            ],
            "instability": self.instability,
        }


def _taylor_coefficients(E: KernelFunction, N: int, radius: float, points: int) -> np.ndarray:
    ang = 2 * np.pi * np.arange(points) / points
    v = radius * np.exp(1j * ang)
    V1, V2 = np.meshgrid(v, v, indexing="ij")
    # G(0, ū2; v1, 0) = 1 - E(1/v1, 1/ū2), analytic in (v1, ū2)
    h = E.complement(1.0 / V1, 1.0 / np.conj(V2))
    c = np.fft.fft2(h) / points**2
    k = np.arange(N + 2)
    return c[np.ix_(k, k)] / np.outer(radius**k, radius**k)


def interpolation_data(E: KernelFunction, N: int, radius: float = 0.5, points: int = 64) -> InterpolationData:
    """Taylor data of ``G(0, ū2; v1, 0) = Σ b_mn v1^{m+1} ū2^{n+1}``, ``m + n <= N``.

    Coefficients come from a discrete Cauchy integral on two torus radii;
    their disagreement is the reported instability.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    c1 = _taylor_coefficients(E, N, radius, points)
    c2 = _taylor_coefficients(E, N, 0.8 * radius, points)
    b = np.zeros((N + 1, N + 1), dtype=complex)
    diff = 0.0
    for m in range(N + 1):
        for n in range(N + 1 - m):
            b[m, n] = c1[m + 1, n + 1]
            diff = max(diff, abs(c1[m + 1, n + 1] - c2[m + 1, n + 1]))
    return InterpolationData(b, N, float(diff))
