import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momentkernel.kernel import (
    Annulus,
    Disk,
    PreconditionError,
    annulus_kernel,
    check_margin,
    closed_form_kernel,
    disk_kernel,
    eval_exponential_kernel,
    invert_shape,
    scale_shape,
    schwarz_factorization_check,
    schwarz_reflection_circle,
    transform_kernel,
    translate_shape,
)
from momentkernel.semialgebraic import SemiAlgebraicSet, X, Y, annulus_set, disk_set

DISK = disk_set(1.0)
ANNULUS = annulus_set(1.0, 2.0)

radius = st.floats(1.5, 4.0)
angle = st.floats(0, 2 * np.pi)


def polar(r, t):
    return complex(r * np.cos(t), r * np.sin(t))


class TestClosedForms:
    def test_disk_example(self):
        assert closed_form_kernel(Disk(), 2, 2).value == pytest.approx(0.75, abs=1e-15)

    def test_far_points_give_one(self):
        assert abs(eval_exponential_kernel(DISK, 1e6, 1e6).value - 1) < 1e-10

    def test_annulus_hole_value(self):
        # both points at the centre: r²/R²
        assert closed_form_kernel(Annulus(1, 2), 0, 0).value == pytest.approx(0.25, abs=1e-15)

    def test_annulus_outside_value(self):
        # (p - R²)/(p - r²) with p = 9
        assert closed_form_kernel(Annulus(1, 2), 3, 3).value == pytest.approx(0.625, abs=1e-15)

    def test_annulus_mixed_regime_is_one(self):
        assert annulus_kernel(0.2, 3.0, 1.0, 2.0) == 1

    def test_inside_disk_rejected(self):
        with pytest.raises(PreconditionError) as info:
            closed_form_kernel(Disk(), 0.5, 2)
        assert info.value.details["distance_to_set"] == 0.0

    def test_on_annulus_rejected(self):
        with pytest.raises(PreconditionError):
            closed_form_kernel(Annulus(1, 2), 1.5, 3)

    @pytest.mark.parametrize("args", [(0.0,), (-1.0,)])
    def test_bad_disk(self, args):
        with pytest.raises(ValueError):
            Disk(*args)

    @pytest.mark.parametrize("r, R", [(2, 1), (0, 1), (1, 1)])
    def test_bad_annulus(self, r, R):
        with pytest.raises(ValueError):
            Annulus(r, R)


class TestNumericKernel:
    def test_margin_enforced(self):
        with pytest.raises(PreconditionError) as info:
            eval_exponential_kernel(DISK, 1.0005, 2)
        assert set(info.value.details) == {"point", "distance_bound", "margin"}

    def test_margin_passes_far_points(self):
        check_margin(DISK, [3, -3j])

    def test_disk_matches_closed_form(self):
        z, w = 2 + 1j, -1.5 + 0.5j
        e = eval_exponential_kernel(DISK, z, w)
        assert e.method == "numeric"
        assert abs(e.value - disk_kernel(z, w)) <= 1e-6 * abs(disk_kernel(z, w))

    @pytest.mark.parametrize("z, w", [(0, 0), (0.3 + 0.2j, -0.5j), (3, 3), (2.5j, -3 + 1j), (0.2, 3)])
    def test_annulus_matches_closed_form(self, z, w):
        e = eval_exponential_kernel(ANNULUS, z, w)
        assert abs(e.value - annulus_kernel(z, w, 1.0, 2.0)) <= 1e-5

    @given(radius, angle, radius, angle)
    def test_hermitian_symmetry(self, r1, t1, r2, t2):
        z, w = polar(r1, t1), polar(r2, t2)
        a = eval_exponential_kernel(DISK, z, w).value
        b = eval_exponential_kernel(DISK, w, z).value
        assert abs(a - np.conj(b)) <= 1e-12

    @given(radius, angle)
    def test_diagonal_is_in_unit_interval(self, r, t):
        v = eval_exponential_kernel(DISK, polar(r, t), polar(r, t)).value
        assert abs(v.imag) <= 1e-12 and 0 < v.real < 1

    def test_multiplicative_over_disjoint_union(self):
        p1 = 1 - 4 * ((X + 1.5) ** 2 + Y**2)
        p2 = 0.25 - ((X - 1.5) ** 2 + Y**2)
        # -p1 p2 > 0 exactly where one of the two disjoint disks holds
        union = SemiAlgebraicSet((-2, 2, -1, 1), (-(p1 * p2),))
        z, w = 0.1 + 2j, -0.3 - 1.5j
        got = eval_exponential_kernel(union, z, w).value
        want = disk_kernel(z, w, 0.5, -1.5) * disk_kernel(z, w, 0.5, 1.5)
        assert abs(got - want) <= 1e-8


class TestTransformationLaws:
    def test_shape_maps(self):
        assert translate_shape(Disk(1, 1j), 2) == Disk(1, 2 + 1j)
        assert scale_shape(Annulus(1, 2), 2j) == Annulus(2, 4)
        assert invert_shape(Annulus(1, 2)) == Annulus(0.5, 1.0)
        with pytest.raises(PreconditionError):
            invert_shape(Disk(1, 0.5))

    def test_translation_closed_form(self):
        lhs, rhs = transform_kernel("translation", Disk(), 3, 3j, a=1 + 1j)
        assert abs(lhs - rhs) <= 2e-8

    def test_scaling_closed_form(self):
        lhs, rhs = transform_kernel("scaling", Annulus(1, 2), 3, 2.5j, b=2 - 1j)
        assert abs(lhs - rhs) <= 2e-8

    def test_scaling_numeric(self):
        lhs, rhs = transform_kernel("scaling", DISK, 3, 2j, b=2 - 1j)
        assert abs(lhs - rhs) <= 2e-8

    def test_inversion_disk_closed_form(self):
        lhs, rhs = transform_kernel("inversion", Disk(1, 2 + 1j), 0.5, -1j)
        assert abs(lhs - rhs) <= 1e-12

    def test_inversion_needs_nonzero_points(self):
        with pytest.raises(PreconditionError):
            transform_kernel("inversion", Disk(1, 3), 0, 1)

    def test_unknown_law(self):
        with pytest.raises(ValueError):
            transform_kernel("rotation", Disk(), 2, 2)


class TestSchwarzFactorization:
    def test_reflection_is_involution_fixing_circle(self):
        w = 1.3 * np.exp(0.4j)
        assert abs(schwarz_reflection_circle(w, 2.0) - 4 / np.conj(w)) < 1e-15
        on = 2 * np.exp(1.1j)
        assert abs(schwarz_reflection_circle(on, 2.0) - on) < 1e-15

    @given(st.floats(0.5, 3.0), st.floats(1.01, 3.0), angle, st.floats(1.01, 3.0), angle)
    def test_residual_vanishes(self, R, s1, t1, s2, t2):
        z, w = polar(R * s1, t1), polar(R * s2, t2)
        assert schwarz_factorization_check(R, [(z, w)]) <= 1e-14 * max(1.0, abs(z))

    def test_inside_sample_rejected(self):
        with pytest.raises(PreconditionError):
            schwarz_factorization_check(1.0, [(0.5, 2)])
