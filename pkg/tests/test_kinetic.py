import unittest
import math
import sys
import os
import tempfile
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lab.circlegeom import E1, TWO_PI, TrigPolynomial, UnitVec, circle_nodes
from lab.cost import cost
from lab.entropy import JumpConfig, build_entropy, random_polynomial
from lab.errors import DomainError, SamplingError
from lab.fields import Bump, make_jump_field, make_vortex_field
from lab.kinetic import (
    KineticDensity,
    LineSigma,
    compare_with_profile,
    duality_check,
    kinetic_residual,
    low_mode_pairings,
    maxwellian,
    maxwellian_average,
    psi_of,
    sigma_jump,
    velocity_moment,
)

BUMP = Bump((0.55, 0.5), 0.25)
SIN_2S = TrigPolynomial.mode(2, 'sin')


class TestMaxwellian(unittest.TestCase):
    def test_half_circle(self):
        self.assertEqual(maxwellian(E1, 0.3), 1)
        self.assertEqual(maxwellian(E1, math.pi), 0)
        # boundary of the half circle counts as outside
        self.assertEqual(maxwellian(E1, 0.5 * math.pi), 0)

    def test_average_recovers_direction(self):
        m = UnitVec.from_angle(0.8)
        np.testing.assert_allclose(maxwellian_average(m, 1024), [m.x, m.y], atol=1e-2)


class TestVelocityMoment(unittest.TestCase):
    def setUp(self):
        self.f = random_polynomial(6, np.random.default_rng(11))
        self.theta = circle_nodes(50)

    def test_exact_moment_is_minus_entropy(self):
        moment = velocity_moment(psi_of(self.f), self.theta)
        np.testing.assert_allclose(moment, -build_entropy(self.f).evaluate(self.theta), atol=1e-10)

    def test_quadrature_moment(self):
        psi = psi_of(self.f)
        exact = velocity_moment(psi, self.theta)
        approx = velocity_moment(psi, self.theta, samples=4096)
        np.testing.assert_allclose(approx, exact, atol=1e-2)

    def test_too_few_samples(self):
        with self.assertRaises(SamplingError):
            velocity_moment(psi_of(self.f), 0.0, samples=128)


class TestKineticDensity(unittest.TestCase):
    def test_sigma_of_jump_matches_profile(self):
        for beta in (0.3, math.pi / 4, 1.3):
            density = sigma_jump(JumpConfig.symmetric(beta), 4096)
            sign, l1_error = compare_with_profile(density, beta)
            self.assertEqual(sign, 1)
            self.assertLessEqual(l1_error, 1e-3)
            self.assertAlmostEqual(density.l1_norm, cost(2.0 * math.sin(beta)), delta=1e-3)

    @given(st.floats(min_value=0.0, max_value=TWO_PI))
    @settings(max_examples=20, deadline=None)
    def test_l1_norm_is_rotation_invariant(self, rotation):
        base = sigma_jump(JumpConfig.symmetric(0.7), 4096).l1_norm
        rotated = sigma_jump(JumpConfig.symmetric(0.7, rotation=rotation), 4096).l1_norm
        self.assertAlmostEqual(rotated, base, delta=1e-4)

    def test_validation(self):
        with self.assertRaises(SamplingError):
            KineticDensity(np.zeros(100))
        with self.assertRaises(DomainError):
            KineticDensity(np.ones(256))
        with self.assertRaises(SamplingError):
            sigma_jump(JumpConfig.symmetric(0.5), 64)

    def test_csv_round_trip(self):
        density = sigma_jump(JumpConfig.symmetric(0.6), 512)
        with tempfile.TemporaryDirectory() as tmp:
            path = density.to_csv(Path(tmp) / 'sigma.csv')
            restored = KineticDensity.from_csv(path)
        np.testing.assert_allclose(restored.values, density.values, rtol=1e-12, atol=1e-15)

    def test_line_sigma_needs_jump(self):
        with self.assertRaises(DomainError):
            LineSigma.for_field(make_vortex_field((0.5, 0.5), 1, n=32))


class TestKineticEquation(unittest.TestCase):
    def test_jump_residual_decreases(self):
        residuals = []
        for n in (64, 128):
            grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=n)
            sigma = LineSigma.for_field(grid_field, 16384)
            residuals.append(kinetic_residual(grid_field, sigma, BUMP, SIN_2S))
        self.assertGreaterEqual(residuals[0] / residuals[1], 1.7)

    def test_sigma_is_needed_for_jumps(self):
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=64)
        with_sigma = kinetic_residual(grid_field, LineSigma.for_field(grid_field, 16384), BUMP, SIN_2S)
        without = kinetic_residual(grid_field, None, BUMP, SIN_2S)
        self.assertLess(with_sigma, 0.1 * without)

    def test_low_modes_vanish(self):
        grid_field = make_jump_field(JumpConfig.symmetric(0.7), n=128)
        for value in low_mode_pairings(grid_field, BUMP):
            self.assertLessEqual(abs(value), 1e-3)

    def test_duality_with_production(self):
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=128)
        sigma = LineSigma.for_field(grid_field, 4096)
        report = duality_check(grid_field, TrigPolynomial.mode(2, 'cos'), BUMP, sigma=sigma)
        self.assertLessEqual(report.relative_discrepancy, 0.05)
        self.assertAlmostEqual(report.sigma_side / report.production_side, 1.0, delta=0.05)


if __name__ == '__main__':
    unittest.main()
