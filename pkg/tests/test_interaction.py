import unittest
import math
import sys
import os

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lab.circlegeom import E1, TWO_PI, UnitVec
from lab.entropy import JumpConfig
from lab.errors import DomainError, SamplingError
from lab.fields import (
    DEFAULT_MARGIN,
    grid_displacement,
    interior_mask,
    make_jump_field,
    make_smooth_field,
    make_vortex_field,
)
from lab.interaction import (
    BRANCH_LARGE,
    BRANCH_SMALL,
    coercivity_ratio,
    coercivity_scan,
    delta_field_integral,
    delta_quadrature,
    half_angle_between,
    jk_differences,
    jk_immersion_check,
    jk_matrix,
    jk_points,
    jk_quartic_ratio_closed_form,
    jk_quartic_scan,
    phi_kernel,
    quartic_increment_integral,
    xi_closed_form,
    xi_general,
    xi_profile,
)
from lab.production import increment_norm

angles = st.floats(min_value=0.0, max_value=TWO_PI)


class TestKernel(unittest.TestCase):
    def test_phi_values(self):
        self.assertEqual(phi_kernel(0.0, 0.3), 1)
        self.assertEqual(phi_kernel(0.0, 2.0), -1)
        self.assertEqual(phi_kernel(0.0, math.pi + 0.3), 1)
        self.assertEqual(phi_kernel(0.0, 0.0), 0)
        self.assertEqual(phi_kernel(1.0, 1.0 + 0.5 * math.pi), 0)
        np.testing.assert_array_equal(phi_kernel(0.0, np.array([0.1, 1.7])), [1, -1])

    def test_half_angle(self):
        self.assertAlmostEqual(float(half_angle_between(0.1, TWO_PI - 0.1)), 0.1)
        self.assertAlmostEqual(float(half_angle_between(0.0, math.pi)), 0.5 * math.pi)


class TestXi(unittest.TestCase):
    def test_closed_form(self):
        self.assertEqual(xi_closed_form(0.0), 0.0)
        self.assertAlmostEqual(xi_closed_form(math.pi / 4), 8.0 * (math.pi / 2.0 - 1.0))
        self.assertAlmostEqual(xi_closed_form(math.pi / 2), 8.0 * (math.pi - 2.0))
        self.assertAlmostEqual(xi_closed_form(1e-3), 8.0 * (2e-3) ** 3 / 6.0, places=12)
        with self.assertRaises(DomainError):
            xi_closed_form(2.0)

    def test_branches(self):
        self.assertEqual(xi_profile(0.5).branch, BRANCH_SMALL)
        self.assertEqual(xi_profile(math.pi / 4).branch, BRANCH_SMALL)
        self.assertEqual(xi_profile(1.0).branch, BRANCH_LARGE)

    @given(angles, angles, angles)
    @settings(max_examples=50, deadline=None)
    def test_rotation_invariance(self, a, b, rotation):
        base = xi_general(UnitVec.from_angle(a), UnitVec.from_angle(b))
        rotated = xi_general(UnitVec.from_angle(a + rotation), UnitVec.from_angle(b + rotation))
        self.assertAlmostEqual(base, rotated, places=8)

    def test_quadrature_agrees_with_closed_form(self):
        for beta in (0.3, math.pi / 4, 1.2):
            m1, m2 = UnitVec.from_angle(beta), UnitVec.from_angle(-beta)
            self.assertAlmostEqual(delta_quadrature(m1, m2), xi_closed_form(beta), delta=1e-3)
        with self.assertRaises(SamplingError):
            delta_quadrature(E1, E1, samples=64)


class TestCoercivity(unittest.TestCase):
    def test_ratio_limits(self):
        self.assertAlmostEqual(float(coercivity_ratio(1e-4)), 4.0 / 3.0, places=6)
        self.assertAlmostEqual(float(coercivity_ratio(0.5 * math.pi)), math.pi - 2.0)

    def test_scan(self):
        minimum, argmin = coercivity_scan(10_000)
        self.assertGreaterEqual(minimum, 1.0)
        self.assertAlmostEqual(minimum, math.pi - 2.0, places=6)
        self.assertAlmostEqual(argmin, 0.5 * math.pi)
        with self.assertRaises(SamplingError):
            coercivity_scan(50)

    def test_field_integral_of_jump(self):
        h = 4.0 / 128
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=128)
        expected = h * 0.7 * xi_closed_form(math.pi / 4)
        self.assertAlmostEqual(delta_field_integral(grid_field, h) / expected, 1.0, delta=0.05)
        self.assertEqual(delta_field_integral(grid_field, h, direction=(0.0, 1.0)), 0.0)

    def test_field_integral_dominates_cubic_increments(self):
        minimum, _ = coercivity_scan(1000)
        h = 4.0 / 64
        region = interior_mask(64, 1.0, DEFAULT_MARGIN)
        fields = (make_vortex_field((0.4, 0.55), 1, n=64),
                  make_jump_field(JumpConfig.symmetric(1.2), n=64),
                  make_smooth_field(3.0, n=64))
        for grid_field in fields:
            for direction in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
                z = grid_displacement(h, direction, grid_field.spacing)
                cubic = increment_norm(grid_field, z, 3.0, region)
                delta = delta_field_integral(grid_field, h, direction)
                self.assertGreaterEqual(delta, minimum * cubic * (1.0 - 1e-9), (grid_field.kind, direction))


class TestJinKohnQuartic(unittest.TestCase):
    def test_matrix_at_e1(self):
        np.testing.assert_allclose(jk_matrix(E1), [[0.0, -2.0 / 3.0], [4.0 / 3.0, 0.0]], atol=1e-12)

    def test_closed_form_limit(self):
        self.assertAlmostEqual(jk_quartic_ratio_closed_form(1e-4), 1.0 / 24.0, places=8)
        with self.assertRaises(DomainError):
            jk_quartic_ratio_closed_form(0.0)

    def test_scan(self):
        scan = jk_quartic_scan(10_000)
        self.assertTrue(scan.positive)
        self.assertAlmostEqual(scan.minimum, 1.0 / 24.0, delta=1e-4)
        self.assertAlmostEqual(scan.minimum, jk_quartic_ratio_closed_form(scan.argmin_separation), places=8)
        with self.assertRaises(SamplingError):
            jk_quartic_scan(100)

    def test_differences(self):
        theta1, theta2 = np.array([0.3, 2.0]), np.array([1.7, 5.1])
        np.testing.assert_allclose(jk_differences(theta1, theta2), jk_points(theta1) - jk_points(theta2),
                                   atol=1e-13)

    def test_near_diagonal_ratio(self):
        for separation in (1e-3, 3e-3, 0.05):
            for base in (0.0, 0.7, 4.0):
                diff = jk_differences(base + separation, base)
                det = np.linalg.det(diff)
                ratio = det / np.sum(diff ** 2) ** 2
                self.assertAlmostEqual(ratio / jk_quartic_ratio_closed_form(separation), 1.0, places=7)

    def test_immersion(self):
        self.assertGreater(jk_immersion_check(), 0.0)

    def test_quartic_increment_of_jump(self):
        h = 4.0 / 128
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=128)
        # |m+ - m-|^4 = 4 at beta = pi/4
        expected = h * 0.7 * 4.0
        self.assertAlmostEqual(quartic_increment_integral(grid_field, h) / expected, 1.0, delta=0.05)


if __name__ == '__main__':
    unittest.main()
