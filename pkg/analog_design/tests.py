import math

from django.test import SimpleTestCase

from .sallen_key import (
    AnalogDesignError, SecondOrderTF, quality_factor, sallen_key_design, sallen_key_transfer,
    sallen_key_transfer_general, stability_check, tf_magnitude, tf_poles,
)


class SallenKeyDesignTests(SimpleTestCase):

    def test_worked_example(self):
        d = sallen_key_design(7, 6, 15e-9, 1000)
        self.assertEqual(d.k, 5.5)
        self.assertEqual(d.f_c, 5000.0)
        self.assertAlmostEqual(d.r, 2122.07, delta=0.01)
        self.assertAlmostEqual(d.r_b, 4500.0, places=9)

    def test_unit_design(self):
        d = sallen_key_design(0, 0, 1e-6, 1000)
        self.assertEqual(d.k, 2.0)
        self.assertEqual(d.f_c, 2000.0)
        self.assertAlmostEqual(d.r, 1 / (2 * math.pi * 2000 * 1e-6), places=9)
        self.assertAlmostEqual(d.r, 79.58, delta=0.01)
        self.assertEqual(d.r_b, 1000.0)

    def test_degenerate_gain(self):
        with self.assertRaises(AnalogDesignError):
            sallen_key_design(-2, 6, 15e-9, 1000)
        with self.assertRaises(AnalogDesignError):
            sallen_key_design(-3, 6, 15e-9, 1000)

    def test_non_physical_components(self):
        for c, r_a in ((0.0, 1000), (-1e-9, 1000), (15e-9, 0.0)):
            with self.assertRaises(AnalogDesignError):
                sallen_key_design(7, 6, c, r_a)
        with self.assertRaises(AnalogDesignError):
            sallen_key_design(7, 6, 15e-9, 1000, r_override=0.0)

    def test_r_override(self):
        d = sallen_key_design(7, 6, 15e-9, 1000, r_override=2200)
        self.assertEqual(d.r, 2200)
        self.assertEqual(d.f_c, 5000.0)


class TransferFunctionTests(SimpleTestCase):

    def printed_tf(self):
        return sallen_key_transfer(sallen_key_design(7, 6, 15e-9, 1000, r_override=2200))

    def test_printed_coefficients(self):
        tf = self.printed_tf()
        self.assertAlmostEqual(tf.b0 / 5.05e9, 1.0, delta=0.025)
        self.assertAlmostEqual(tf.a1 / -75757.7, 1.0, delta=0.025)
        self.assertAlmostEqual(tf.a0 / 9.2e8, 1.0, delta=0.025)

    def test_unity_buffer(self):
        tf = sallen_key_transfer(sallen_key_design(-2 + 1e-12, 0, 1e-6, 1000, r_override=100))
        rc = 100 * 1e-6
        self.assertAlmostEqual(tf.b0 / tf.a0, 1.0, places=9)
        self.assertAlmostEqual(tf.a1, 2 / rc, delta=1e-3)

    def test_dc_gain_is_k(self):
        for alpha in (-1.5, 0, 1, 2, 7):
            d = sallen_key_design(alpha, 1, 10e-9, 1000)
            tf = sallen_key_transfer(d)
            self.assertAlmostEqual(tf_magnitude(tf, 0.0) / d.k, 1.0, places=12)

    def test_magnitude_matches_complex_oracle(self):
        tf = self.printed_tf()
        s = complex(0, 2 * math.pi * 5000)
        expected = abs(tf.b0 / (s ** 2 + tf.a1 * s + tf.a0))
        self.assertAlmostEqual(tf_magnitude(tf, 5000) / expected, 1.0, delta=1e-9)

    def test_high_frequency_decay(self):
        tf = self.printed_tf()
        self.assertLess(tf_magnitude(tf, 1e8), 1e-3 * 5.5)

    def test_monotone_beyond_resonance(self):
        d = sallen_key_design(0, 0, 1e-6, 1000)
        tf = sallen_key_transfer(d)
        freqs = [d.f_c * 2 * 1.1 ** n for n in range(60)]
        mags = [tf_magnitude(tf, f) for f in freqs]
        self.assertTrue(all(a > b for a, b in zip(mags, mags[1:])))

    def test_negative_frequency_rejected(self):
        with self.assertRaises(AnalogDesignError):
            tf_magnitude(self.printed_tf(), -1.0)

    def test_general_form_reduces_to_equal_components(self):
        d = sallen_key_design(1, 2, 22e-9, 1000)
        equal = sallen_key_transfer(d)
        general = sallen_key_transfer_general(d.r, d.r, d.c, d.c, d.k)
        for a, b in ((equal.b0, general.b0), (equal.a1, general.a1), (equal.a0, general.a0)):
            self.assertAlmostEqual(a / b, 1.0, places=12)
        with self.assertRaises(AnalogDesignError):
            sallen_key_transfer_general(0, 1, 1, 1, 2)


class StabilityTests(SimpleTestCase):

    def test_printed_design_is_unstable(self):
        tf = sallen_key_transfer(sallen_key_design(7, 6, 15e-9, 1000, r_override=2200))
        self.assertFalse(stability_check(tf))
        self.assertTrue(all(p.real > 0 for p in tf_poles(tf)))

    def test_simple_cases(self):
        self.assertTrue(stability_check(SecondOrderTF(1.0, 100.0, 1e6)))
        self.assertFalse(stability_check(SecondOrderTF(1.0, 0.0, 1e6)))

    def test_sign_of_three_minus_k(self):
        for alpha in (-1.9, -1, 0, 1, 1.9):
            tf = sallen_key_transfer(sallen_key_design(alpha, 0, 1e-6, 1000))
            self.assertTrue(stability_check(tf))
        for alpha in (2.1, 3, 7, 20):
            tf = sallen_key_transfer(sallen_key_design(alpha, 0, 1e-6, 1000))
            self.assertFalse(stability_check(tf))

    def test_poles_are_roots(self):
        tf = SecondOrderTF(1.0, 100.0, 1e6)
        for p in tf_poles(tf):
            self.assertAlmostEqual(abs(p * p + tf.a1 * p + tf.a0), 0.0, delta=1e-6)
        self.assertAlmostEqual(abs(tf_poles(tf)[0]), math.sqrt(1e6), places=6)

    def test_quality_factor(self):
        # K = 1 gives Q = 1/2 for the equal-component network
        tf = SecondOrderTF(1.0, 2.0, 1.0)
        self.assertEqual(quality_factor(tf), 0.5)
        with self.assertRaises(AnalogDesignError):
            quality_factor(SecondOrderTF(1.0, 0.0, 1.0))

    def test_degenerate_denominator_rejected(self):
        for a0 in (0.0, -1e6, float('nan')):
            with self.assertRaises(AnalogDesignError):
                SecondOrderTF(1.0, 0.0, a0)
        with self.assertRaises(AnalogDesignError):
            SecondOrderTF(float('inf'), 1.0, 1.0)
