"""Dense dual simplex for ``min c·x  s.t.  A x = b,  l <= x <= u``.

Every variable must have finite bounds.  The LPs in this package have a
handful of equality rows and tens of thousands of boxed columns, the shape
where a dual simplex with a bound-flipping ratio test does well: one
iteration can move any number of nonbasic variables between their bounds,
so the iteration count scales with the number of rows instead of the
number of columns.

The basis starts on fixed artificial columns, which makes the initial
basis dual feasible for any cost vector.  The leaving row is the most
infeasible basic variable.  After a streak of degenerate iterations both
the leaving and the entering choice fall back to smallest-index rules,
which prevents cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    status: str
    iterations: int

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def solve_lp(
    c,
    A_eq,
    b_eq,
    lower,
    upper,
    max_iter: int | None = None,
    tol: float = 1e-9,
) -> LPResult:
    """Solve ``min c·x`` subject to ``A_eq x = b_eq`` and ``lower <= x <= upper``.

    ``duals`` are the equality multipliers ``y`` with reduced costs
    ``c - A_eq.T @ y`` non-negative at lower bounds and non-positive at
    upper bounds.
    """
    A = np.atleast_2d(np.asarray(A_eq, dtype=float))
    b = np.asarray(b_eq, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, n = A.shape
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (n,)).copy()
    up = np.broadcast_to(np.asarray(upper, dtype=float), (n,)).copy()
    if c.size != n or b.size != m:
        raise ValueError("inconsistent LP dimensions")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
        raise ValueError("all variable bounds must be finite")
    if np.any(lo > up):
        return LPResult(np.full(n, np.nan), np.nan, np.zeros(m), "infeasible", 0)
    max_iter = max_iter or 20 * (m + 10) + n

    rs = np.linalg.norm(A, axis=1)
    rs[rs == 0] = 1.0
    A = A / rs[:, None]
    b = b / rs
    # costs scaled to unit size so the optimality tolerance is relative
    cs = float(np.max(np.abs(c))) if n else 1.0
    cs = cs if cs > 0 else 1.0

    # artificial columns fixed at zero complete the matrix to full row rank
    Aa = np.hstack([A, np.eye(m)])
    ca = np.concatenate([c / cs, np.zeros(m)])
    la = np.concatenate([lo, np.zeros(m)])
    ua = np.concatenate([up, np.zeros(m)])
    rng = ua - la
    colnorm = np.linalg.norm(Aa, axis=0)
    ntot = n + m
    basis = np.arange(n, n + m)
    x = np.where(ca >= 0, la, ua)
    is_basic = np.zeros(ntot, dtype=bool)
    is_basic[basis] = True
    feas_tol = tol * max(1.0, float(np.max(np.abs(b))) if m else 1.0)

    iterations = 0
    degenerate = 0
    status = "iteration_limit"
    y = np.zeros(m)
    while iterations < max_iter:
        iterations += 1
        B = Aa[:, basis]
        y = np.linalg.solve(B.T, ca[basis])
        d = ca - Aa.T @ y
        # keep nonbasic variables on the bound their reduced cost asks for
        nb = ~is_basic
        x[nb & (d < -tol * colnorm)] = ua[nb & (d < -tol * colnorm)]
        x[nb & (d > tol * colnorm)] = la[nb & (d > tol * colnorm)]
        xn = np.where(is_basic, 0.0, x)
        xb = np.linalg.solve(B, b - Aa @ xn)
        x[basis] = xb
        lb, ub = la[basis], ua[basis]
        viol = np.maximum(lb - xb, xb - ub)
        if np.all(viol <= feas_tol):
            status = "optimal"
            break
        bland = degenerate > 30
        if bland:
            bad = np.nonzero(viol > feas_tol)[0]
            r = int(bad[np.argmin(basis[bad])])
        else:
            r = int(np.argmax(viol))
        below = xb[r] < lb[r]
        delta = abs(viol[r])

        e = np.zeros(m)
        e[r] = 1.0
        rho = np.linalg.solve(B.T, e)
        alpha = rho @ Aa
        piv = 1e-9 * np.maximum(colnorm, 1.0)
        at_up = x >= ua - 1e-12 * np.maximum(1.0, np.abs(ua))
        movable = nb & (rng > 0)
        if below:
            elig = movable & (((~at_up) & (alpha < -piv)) | (at_up & (alpha > piv)))
        else:
            elig = movable & (((~at_up) & (alpha > piv)) | (at_up & (alpha < -piv)))
        cand = np.nonzero(elig)[0]
        if cand.size == 0:
            status = "infeasible"
            break
        ratio = np.abs(d[cand]) / np.abs(alpha[cand])
        if bland:
            order = np.lexsort((cand, ratio))
        else:
            # ties broken towards larger pivots for stability
            order = np.lexsort((-np.abs(alpha[cand]), ratio))
        cand = cand[order]
        ratio = ratio[order]
        slope = delta - np.cumsum(np.abs(alpha[cand]) * rng[cand])
        k = int(np.argmax(slope <= 0)) if np.any(slope <= 0) else cand.size - 1
        q = int(cand[k])
        passed = cand[:k]
        x[passed] = np.where(at_up[passed], la[passed], ua[passed])
        degenerate = degenerate + 1 if ratio[k] <= tol else 0

        leaving = int(basis[r])
        x[leaving] = la[leaving] if below else ua[leaving]
        is_basic[leaving] = False
        is_basic[q] = True
        basis[r] = q

    xs = x[:n].copy()
    duals = y * cs / rs
    obj = float(c @ xs) if status == "optimal" else np.nan
    return LPResult(xs, obj, duals, status, iterations)
