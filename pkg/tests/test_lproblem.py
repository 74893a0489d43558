import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentkernel.lproblem import (
    LProblemConfig,
    ProblemError,
    canonical_sign,
    chebyshev_bounds,
    critical_L,
    extremal_reconstruct,
    hausdorff_distance,
    krein_search,
    midpoint_grid,
    moments_of_positive_set,
    moments_of_sign,
    normalize_bounds,
    sign_agreement,
    zero_set_points,
)
from momentkernel.semialgebraic import MomentVector, Poly2, SemiAlgebraicSet, X, Y

UNIT_BOX = SemiAlgebraicSet((0, 1, 0, 1))
SLAB = SemiAlgebraicSet((-1, 1, -1, 1))
COARSE = LProblemConfig(grid=40)


class TestGrid:
    def test_weights_sum_to_area(self):
        g = midpoint_grid(SLAB, 50)
        assert g.size == 2500 and np.sum(g.w) == pytest.approx(4)

    def test_empty_grid(self):
        with pytest.raises(ProblemError):
            midpoint_grid(SemiAlgebraicSet((0, 1, 0, 1), (X - 2,)), 10)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            LProblemConfig(grid=1)


class TestMomentMaps:
    def test_sign_of_x(self):
        assert np.allclose(moments_of_sign(X, SLAB, 1).entries, [0, 2, 0], atol=1e-8)

    def test_positive_set(self):
        assert np.allclose(moments_of_positive_set(X, SLAB, 1).entries, [2, 1, 0], atol=1e-8)

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            moments_of_sign(Poly2(), SLAB, 1)

    def test_normalize_round_trip(self):
        a = MomentVector(1, [0.3, 0.1, -0.05])
        b = normalize_bounds(normalize_bounds(a, UNIT_BOX, 2.0), UNIT_BOX, 2.0, inverse=True)
        assert np.allclose(a.entries, b.entries, atol=1e-14)

    def test_normalize_rejects_bad_L(self):
        with pytest.raises(ValueError):
            normalize_bounds(MomentVector(0, [1.0]), UNIT_BOX, 0.0)


class TestCriticalL:
    def test_zero_moments(self):
        assert critical_L(SLAB, 1, MomentVector(1, [0, 0, 0]), COARSE) == (0.0, None)

    def test_constant_density(self):
        L0, _ = critical_L(UNIT_BOX, 0, MomentVector(0, [0.7]), COARSE)
        assert L0 == pytest.approx(0.7, abs=1e-9)

    def test_order_mismatch(self):
        with pytest.raises(ValueError):
            critical_L(SLAB, 2, MomentVector(1, [0, 1, 0]))

    @settings(max_examples=15)
    @given(st.lists(st.floats(-1, 1, allow_subnormal=False), min_size=3, max_size=3), st.floats(0.1, 5))
    def test_homogeneous(self, v, t):
        a = MomentVector(1, v)
        grid = midpoint_grid(SLAB, 20)
        L1, _ = critical_L(SLAB, 1, a, grid=grid)
        Lt, _ = critical_L(SLAB, 1, MomentVector(1, t * np.asarray(v)), grid=grid)
        assert Lt == pytest.approx(t * L1, rel=1e-6, abs=1e-9)


class TestKrein:
    @pytest.mark.parametrize("a00, want", [(0.5, -0.5), (1.0, 0.0), (1.5, 0.5)])
    def test_constant_margins(self, a00, want):
        r = krein_search(UNIT_BOX, 0, MomentVector(0, [a00]), COARSE)
        assert r.margin == pytest.approx(want, abs=1e-3)
        assert r.solvable == (want <= 0)


class TestChebyshev:
    def test_half_mass_first_moment(self):
        cb = chebyshev_bounds(UNIT_BOX, 0, MomentVector(0, [0.5]), lambda x, y: x, COARSE)
        assert (cb.min_value, cb.max_value) == pytest.approx((1 / 8, 3 / 8), abs=1e-2)
        assert np.all((cb.phi_min >= -1e-12) & (cb.phi_min <= 1 + 1e-12))

    def test_brackets_feasible_densities(self):
        rng = np.random.default_rng(7)
        grid = midpoint_grid(UNIT_BOX, 30)
        psi = lambda x, y: x * y - y  # noqa: E731
        for _ in range(20):
            phi = rng.random(grid.size)
            cb = chebyshev_bounds(UNIT_BOX, 1, grid.moments(phi, 1), psi, grid=grid)
            value = float(np.sum(psi(grid.x, grid.y) * grid.w * phi))
            assert cb.min_value - 1e-9 <= value <= cb.max_value + 1e-9

    def test_unattainable(self):
        with pytest.raises(ProblemError):
            chebyshev_bounds(UNIT_BOX, 0, MomentVector(0, [2.0]), lambda x, y: x, COARSE)


class TestReconstruction:
    def test_half_slab(self):
        sol = extremal_reconstruct(SLAB, 1, MomentVector(1, [2, 1, 0]), COARSE)
        assert sol.converged
        line = np.stack([np.zeros(201), np.linspace(-1, 1, 201)], axis=1)
        assert hausdorff_distance(zero_set_points(sol.p, SLAB), line) <= 1e-2

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            extremal_reconstruct(SLAB, 1, MomentVector(1, [2, 1, 0]), variant="other")


class TestGeometry:
    def test_canonical_sign(self):
        q = canonical_sign(-2 * X + Y, 1)
        assert np.allclose(q.to_vector(1), np.array([0, 2, -1]) / np.sqrt(5))

    def test_zero_set_of_circle(self):
        P = zero_set_points(1 - X**2 - Y**2, SLAB, 200)
        assert np.allclose(np.hypot(P[:, 0], P[:, 1]), 1, atol=1e-3)

    def test_hausdorff_empty(self):
        assert hausdorff_distance(np.zeros((0, 2)), np.zeros((1, 2))) == float("inf")

    def test_sign_agreement(self):
        g = midpoint_grid(SLAB, 20)
        assert sign_agreement(X, 2 * X, g) == 1
        assert sign_agreement(X, -X, g) == 0
