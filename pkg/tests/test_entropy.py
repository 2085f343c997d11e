import unittest
import math
import sys
import os

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lab.circlegeom import E1, TrigPolynomial, circle_nodes
from lab.entropy import (
    IDENTITY_ENTROPY,
    Entropy,
    JumpConfig,
    build_entropy,
    c2_constant_estimate,
    custom_entropy,
    entropy_defect,
    entropy_dictionary,
    entropy_generator,
    jin_kohn,
    jin_kohn_direct,
    jump_pairing,
    random_polynomial,
)
from lab.errors import AdmissibilityError, DomainError

COS_2T = TrigPolynomial.mode(2, 'cos')


class TestEntropyPipeline(unittest.TestCase):
    def test_cos_2t_is_half_jin_kohn(self):
        difference = build_entropy(COS_2T) - jin_kohn(0.0).scaled(-0.5)
        self.assertLessEqual(np.max(np.abs(difference.representation())), 1e-10)

    def test_sin_2t_frame_identity(self):
        phi = build_entropy(TrigPolynomial.mode(2, 'sin'))
        self.assertTrue(phi.allclose(jin_kohn(math.pi / 4).scaled(-0.5), 1e-10))

    def test_odd_and_low_modes_are_annihilated(self):
        for k in (0, 1, 3, 5, 7):
            for kind in ('cos', 'sin'):
                self.assertTrue(build_entropy(TrigPolynomial.mode(k, kind)).is_zero(1e-12), (k, kind))

    def test_generator_is_mean_free(self):
        psi = entropy_generator(TrigPolynomial.mode(3, 'sin'))
        self.assertEqual(psi.a0, 0.0)
        self.assertAlmostEqual(float(psi.evaluate(np.array(0.0))), -1.0 / 3.0, places=12)
        np.testing.assert_allclose(psi.derivative().sin, TrigPolynomial.mode(3, 'sin').sin, atol=1e-15)

    def test_trivial_entropy_produces_nothing(self):
        self.assertLessEqual(entropy_defect(IDENTITY_ENTROPY), 1e-14)
        for beta in (0.2, 1.1):
            self.assertAlmostEqual(jump_pairing(IDENTITY_ENTROPY, JumpConfig.symmetric(beta, rotation=0.3)), 0.0,
                                   places=12)

    def test_random_polynomials_are_entropies(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            entropy = build_entropy(random_polynomial(8, rng))
            self.assertLessEqual(entropy_defect(entropy), 1e-8)

    def test_jin_kohn_matches_direct_formula(self):
        t = circle_nodes(37)
        z = np.stack([np.cos(t), np.sin(t)], axis=-1)
        for frame in (0.0, 0.3, math.pi / 4):
            np.testing.assert_allclose(jin_kohn(frame).evaluate(t), jin_kohn_direct(frame, z), atol=1e-12)

    @given(st.floats(min_value=0.01, max_value=0.5 * math.pi))
    @settings(max_examples=30, deadline=None)
    def test_jump_pairing_of_cos_2t(self, beta):
        pairing = jump_pairing(build_entropy(COS_2T), JumpConfig.symmetric(beta))
        self.assertAlmostEqual(pairing, -(2.0 * math.sin(beta)) ** 3 / 6.0, places=10)

    @given(st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=6, max_size=6),
           st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=6, max_size=6))
    @settings(max_examples=30, deadline=None)
    def test_pipeline_is_linear(self, a, b):
        f = TrigPolynomial(0.0, a[:3], a[3:])
        g = TrigPolynomial(0.0, b[:3], b[3:])
        combined = build_entropy(f + 2.0 * g)
        separate = build_entropy(f) + build_entropy(g).scaled(2.0)
        self.assertTrue(combined.allclose(separate, 1e-10))


class TestJumpConfig(unittest.TestCase):
    def test_symmetric_is_admissible(self):
        jump = JumpConfig.symmetric(0.7, rotation=0.4)
        self.assertTrue(jump.is_admissible())
        self.assertAlmostEqual(jump.half_angle, 0.7)
        self.assertAlmostEqual(jump.jump_size, 2.0 * math.sin(0.7))

    def test_inadmissible_jump(self):
        with self.assertRaises(AdmissibilityError):
            JumpConfig(0.3, 0.1, E1).require_admissible()
        with self.assertRaises(AdmissibilityError):
            jump_pairing(jin_kohn(0.0), JumpConfig(0.3, 0.1, E1))


class TestDictionary(unittest.TestCase):
    def test_members_are_normalized(self):
        family = entropy_dictionary(2, 3, seed=1)
        # modes 2 and 4 (cos, sin) plus the random members; mode 3 vanishes
        self.assertEqual(len(family), 7)
        for entropy in family:
            self.assertAlmostEqual(entropy.c2_norm, 1.0, places=9)

    def test_seed_fixes_the_dictionary(self):
        first = entropy_dictionary(1, 4, seed=3)
        second = entropy_dictionary(1, 4, seed=3)
        for a, b in zip(first, second):
            self.assertTrue(a.allclose(b))

    def test_c2_constant_estimate(self):
        constant, index = c2_constant_estimate([TrigPolynomial.zero(2), COS_2T])
        self.assertEqual(index, 1)
        self.assertGreater(constant, 0.0)


class TestCustomEntropy(unittest.TestCase):
    def test_sampled_jin_kohn_is_accepted(self):
        t = circle_nodes(64)
        values = jin_kohn(0.0).evaluate(t)
        entropy = custom_entropy(values[:, 0], values[:, 1])
        self.assertTrue(entropy.allclose(jin_kohn(0.0), 1e-10))

    def test_non_entropy_is_rejected(self):
        t = circle_nodes(64)
        with self.assertRaises(DomainError):
            custom_entropy(np.cos(2.0 * t), np.zeros_like(t))

    def test_dict_round_trip(self):
        entropy = jin_kohn(0.2)
        restored = Entropy.from_dict(entropy.to_dict())
        self.assertTrue(restored.allclose(entropy))
        self.assertEqual(restored.frame_angle, 0.2)


if __name__ == '__main__':
    unittest.main()
