import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momentkernel.quadrature import (
    QuadratureConfig,
    compute_moments,
    distance_lower_bound,
    fixed_rule,
    gauss_legendre,
    integrate_region,
    l1_norm,
    positive_part_integral,
)
from momentkernel.semialgebraic import (
    Poly2,
    SemiAlgebraicSet,
    X,
    Y,
    disk_set,
    moment_dimension,
    multi_indices,
    polygon_set,
)

UNIT_BOX = SemiAlgebraicSet((0, 1, 0, 1))
SLAB = SemiAlgebraicSet((-1, 1, -1, 1))
HALF_SLAB = SemiAlgebraicSet((-1, 1, -1, 1), (X,))
DISK = SemiAlgebraicSet((-1, 1, -1, 1), (1 - X**2 - Y**2,))
TOL = QuadratureConfig().tol


def _triangle_moment(a, b):
    # ∫ over the triangle (0,0), (1,0), (0,1) of x^a y^b = a! b! / (a+b+2)!
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [{"tol": 0}, {"max_depth": 0}, {"gauss_order": 1}, {"boundary_rule": "magic"}, {"min_depth": -1}]
    )
    def test_invalid_rejected(self, kw):
        with pytest.raises(ValueError):
            QuadratureConfig(**kw)

    def test_defaults(self):
        cfg = QuadratureConfig()
        assert (cfg.tol, cfg.max_depth, cfg.gauss_order) == (1e-8, 12, 8)


class TestGaussLegendre:
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_exact_to_degree(self, n):
        t, w = gauss_legendre(n)
        for k in range(2 * n):
            assert np.sum(w * t**k) == pytest.approx(1 / (k + 1), abs=1e-14)


class TestIntegrateRegion:
    def test_box_area(self):
        r = integrate_region(lambda x, y: np.ones_like(x), UNIT_BOX)
        assert r.value == pytest.approx(1, abs=1e-14)
        assert r.error_estimate >= 0 and r.cells_used >= 1

    def test_disk_area(self):
        r = integrate_region(lambda x, y: np.ones_like(x), DISK)
        assert abs(r.value - math.pi) <= TOL

    def test_half_slab_first_moment(self):
        r = integrate_region(lambda x, y: x, HALF_SLAB)
        assert abs(r.value - 1) <= TOL

    def test_complex_integrand(self):
        r = integrate_region(lambda x, y: (x + 1j * y) ** 2 * np.conj(x + 1j * y) ** 2, DISK)
        # ∫ |ζ|⁴ over the unit disk = π/3
        assert abs(r.value - math.pi / 3) <= 10 * TOL

    def test_vector_integrand(self):
        r = integrate_region(lambda x, y: np.stack([np.ones_like(x), x * x]), DISK, vector=True)
        assert r.value.shape == (2,)
        assert np.allclose(r.value, [math.pi, math.pi / 4], atol=10 * TOL)

    def test_indicator_rule(self):
        cfg = QuadratureConfig(boundary_rule="indicator", max_depth=9, tol=1e-4)
        r = integrate_region(lambda x, y: np.ones_like(x), DISK, cfg)
        assert abs(r.value - math.pi) < 1e-3

    def test_deterministic(self):
        f = lambda x, y: np.exp(x) * np.cos(3 * y)  # noqa: E731
        assert integrate_region(f, DISK).value == integrate_region(f, DISK).value

    @pytest.mark.parametrize("order", [4, 8])
    def test_refinement_does_not_hurt(self, order):
        coarse = QuadratureConfig(gauss_order=order, max_depth=6, tol=1e-6)
        fine = QuadratureConfig(gauss_order=2 * order, max_depth=6, tol=1e-6)
        one = lambda x, y: np.ones_like(x)  # noqa: E731
        e1 = abs(integrate_region(one, DISK, coarse).value - math.pi)
        e2 = abs(integrate_region(one, DISK, fine).value - math.pi)
        assert e2 <= e1 + 1e-14

    def test_depth_refinement_does_not_hurt(self):
        one = lambda x, y: np.ones_like(x)  # noqa: E731
        errs = [
            abs(integrate_region(one, DISK, QuadratureConfig(max_depth=d, tol=1e-12)).value - math.pi)
            for d in (4, 8)
        ]
        assert errs[1] <= errs[0] + 1e-14

    @given(
        st.lists(st.floats(-3, 3), min_size=6, max_size=6),
        st.lists(st.floats(-3, 3), min_size=6, max_size=6),
    )
    def test_linearity(self, c1, c2):
        p, q = Poly2.from_vector(c1, 2), Poly2.from_vector(c2, 2)
        I = lambda f: integrate_region(f, DISK).value  # noqa: E731
        lhs = I(lambda x, y: p(x, y) + q(x, y))
        assert abs(lhs - I(p) - I(q)) <= 2 * TOL


class TestMoments:
    def test_unit_box(self):
        assert np.allclose(compute_moments(UNIT_BOX, 1).entries, [1, 0.5, 0.5], atol=1e-14)

    def test_half_slab(self):
        assert np.allclose(compute_moments(HALF_SLAB, 1).entries, [2, 1, 0], atol=TOL)

    def test_empty_set(self):
        S = SemiAlgebraicSet((-1, 1, -1, 1), (X, -X))
        m = compute_moments(S, 3)
        assert m.entries.shape == (moment_dimension(3),)
        assert np.all(m.entries == 0)

    def test_triangle_exact(self):
        S = polygon_set([0, 1, 1j])
        m = compute_moments(S, 4)
        want = [_triangle_moment(a, b) for a, b in multi_indices(4)]
        assert np.allclose(m.entries, want, atol=1e-14)

    def test_disk_moments(self):
        m = compute_moments(disk_set(1.0), 2)
        assert np.allclose(m.entries, [math.pi, 0, 0, math.pi / 4, 0, math.pi / 4], atol=10 * TOL)

    def test_fixed_rule_integrates_polynomials(self):
        x, y, w = fixed_rule(DISK, level=5, gauss_order=4)
        assert np.sum(w) == pytest.approx(math.pi, abs=1e-6)
        assert np.sum(w * x * x) == pytest.approx(math.pi / 4, abs=1e-6)


class TestNorms:
    def test_l1_examples(self):
        assert l1_norm(Poly2.constant(1.0), UNIT_BOX) == pytest.approx(1, abs=1e-14)
        assert abs(l1_norm(X, SLAB) - 2) <= TOL
        assert l1_norm(Poly2(), SLAB) == 0

    def test_positive_part_examples(self):
        assert positive_part_integral(Poly2.constant(1.0), UNIT_BOX) == pytest.approx(1, abs=1e-14)
        assert positive_part_integral(Poly2.constant(-1.0), UNIT_BOX) == 0
        assert abs(positive_part_integral(X, SLAB) - 1) <= TOL

    @given(st.lists(st.floats(-2, 2), min_size=6, max_size=6))
    def test_decomposition(self, c):
        p = Poly2.from_vector(c, 2)
        if p.is_zero:
            return
        total = positive_part_integral(p, SLAB) + positive_part_integral(-p, SLAB)
        assert abs(l1_norm(p, SLAB) - total) <= 2 * TOL


class TestDistance:
    def test_disk_distance(self):
        d = distance_lower_bound(disk_set(1.0), 3 + 0j, reach=5.0)
        assert 1.9 <= d <= 2.0 + 1e-12

    def test_far_point_is_beyond_reach(self):
        assert distance_lower_bound(disk_set(1.0), 10 + 0j, reach=1.0) >= 1.0

    def test_inside_is_zero(self):
        assert distance_lower_bound(disk_set(1.0), 0j, reach=1.0) == 0

    def test_sliver_at_box_edge(self):
        # {p < 0} is a thin sliver at the edge x = -1, between sample points
        # of the box and its first children
        p = Poly2.from_vector([1.5, 1.5, 0.5, 0.5, -1.25, 1.5], 2)
        one = lambda x, y: np.ones_like(x)  # noqa: E731
        pos = integrate_region(one, SLAB.with_constraints(p)).value
        neg = integrate_region(one, SLAB.with_constraints(-p)).value
        assert 5e-4 < neg < 2e-3
        assert abs(pos + neg - 4) <= 2 * TOL

    def test_thin_wedge_through_corner(self):
        # p factors into two lines through the origin, so {p < 0} is a thin
        # double wedge whose apex is a corner of every dyadic cell there
        p = Poly2.from_vector([0, 0, 0, 1.5, 0.25, 1 / 128], 2)
        neg = integrate_region(lambda x, y: -p(x, y), SLAB.with_constraints(-p)).value
        pos = integrate_region(lambda x, y: p(x, y), SLAB.with_constraints(p)).value
        # exact: 2 ∫_0^1 ∫_{-y/8}^{-y/24} -p dx dy = 5 / 69120
        assert abs(neg - 5 / 69120) <= TOL
        assert abs(pos - neg - (2 + 1 / 96)) <= 2 * TOL
