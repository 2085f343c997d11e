import unittest
import math
import sys
import os

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lab.circlegeom import TrigPolynomial, quadrature_circle
from lab.cost import (
    SMALL_JUMP_RATIO,
    cost,
    cost_curve,
    cost_from_beta,
    cost_point,
    cost_quadrature,
    g_beta,
    mass_strictness_check,
    pairing_identity_check,
    profile_offset,
    small_jump_limit,
    smoothed_sign_pairing,
    t_beta,
)
from lab.entropy import random_polynomial
from lab.errors import DomainError

half_angles = st.floats(min_value=0.01, max_value=0.5 * math.pi)


class TestProfile(unittest.TestCase):
    @given(half_angles, st.floats(min_value=-10.0, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_symmetries(self, beta, t):
        value = g_beta(beta, t)
        self.assertAlmostEqual(value, g_beta(beta, -t), places=9)
        self.assertAlmostEqual(value, g_beta(beta, t + math.pi), places=9)
        self.assertAlmostEqual(value, g_beta(beta, math.pi - t), places=9)

    def test_zero_mean(self):
        for beta in (0.2, 0.9, 0.5 * math.pi):
            self.assertAlmostEqual(quadrature_circle(lambda t: g_beta(beta, t), 4096), 0.0, delta=1e-4)

    def test_root_bracket(self):
        for beta in (0.1, 0.7, 1.5):
            root = t_beta(beta)
            self.assertGreaterEqual(root, 0.5 * math.pi - beta)
            self.assertLessEqual(root, 0.5 * math.pi)
            self.assertAlmostEqual(math.sin(root) - math.cos(beta), profile_offset(beta), places=10)


class TestCost(unittest.TestCase):
    def test_value_at_full_jump(self):
        self.assertAlmostEqual(cost(2.0), 1.6843, delta=1e-3)

    def test_quadrature_agrees(self):
        for beta in (0.05, 0.4, math.pi / 4, 1.2, 0.5 * math.pi):
            self.assertAlmostEqual(cost_quadrature(beta), cost_from_beta(beta), places=8)

    def test_small_jump_asymptote(self):
        point = cost_point(0.01)
        self.assertAlmostEqual(point.c_value / point.asymptote, 1.0, delta=0.02)
        # twice the cos 2t production
        self.assertAlmostEqual(point.c_value / point.cubic_bound, 2.0, delta=0.04)

    def test_small_jump_limit(self):
        limit, slope = small_jump_limit(np.linspace(0.01, 0.1, 10))
        self.assertAlmostEqual(limit / SMALL_JUMP_RATIO, 1.0, delta=5e-3)
        self.assertLess(slope, 0.0)
        with self.assertRaises(DomainError):
            small_jump_limit([0.1])

    def test_curve_is_monotone_and_strict(self):
        points = cost_curve(100)
        self.assertEqual(len(points), 100)
        self.assertAlmostEqual(points[-1].beta, 0.5 * math.pi)
        values = np.array([p.c_value for p in points])
        self.assertTrue(np.all(np.diff(values) > 0.0))
        self.assertTrue(all(p.strictness > 0.0 for p in points))

    def test_fine_curve_is_monotone(self):
        points = cost_curve(1000)
        values = np.array([p.c_value for p in points])
        self.assertTrue(np.all(np.diff(values) > 0.0))
        self.assertTrue(all(p.strictness > 0.0 for p in points))

    def test_domain(self):
        for bad in (-0.1, 2.5):
            with self.assertRaises(DomainError):
                cost(bad)
        with self.assertRaises(DomainError):
            t_beta(2.0)
        with self.assertRaises(DomainError):
            cost_curve(0)
        self.assertEqual(cost(0.0), 0.0)


class TestPairings(unittest.TestCase):
    def test_pairing_identity(self):
        sources = [TrigPolynomial.mode(2, 'cos'), random_polynomial(5, np.random.default_rng(4))]
        for f in sources:
            for beta in (0.3, 1.1):
                self.assertLessEqual(pairing_identity_check(beta, f, 65536), 1e-6)

    def test_mass_strictness(self):
        twice_cost, cubic, difference = mass_strictness_check(0.5 * math.pi)
        self.assertAlmostEqual(twice_cost, 3.3686, delta=1e-3)
        self.assertAlmostEqual(cubic, 8.0 / 3.0)
        self.assertAlmostEqual(difference, 0.7020, delta=1e-3)
        with self.assertRaises(DomainError):
            mass_strictness_check(0.0)

    def test_smoothed_sign(self):
        beta = 0.9
        value = smoothed_sign_pairing(beta, 1e-4, 65536)
        self.assertAlmostEqual(value / cost_from_beta(beta), 1.0, delta=0.01)
        with self.assertRaises(DomainError):
            smoothed_sign_pairing(beta, 0.0)


if __name__ == '__main__':
    unittest.main()
