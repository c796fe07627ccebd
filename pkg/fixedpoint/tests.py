import math
import random
from fractions import Fraction

from django.test import SimpleTestCase

from .qformat import (
    DATA_FORMAT, Q15, FixedPointError, QFormat, QSample, coefficient_format,
    dequantize, dot, quantize, round_div, round_shift, sat_add, sat_mul, sat_sub,
)


class QFormatTests(SimpleTestCase):

    def test_parse_and_str(self):
        fmt = QFormat.parse("q24.16")
        self.assertEqual(fmt, DATA_FORMAT)
        self.assertEqual(str(Q15), "q16.15")

    def test_bad_formats_rejected(self):
        for text in ("16.15", "q16", "q1.0", "q65.3"):
            with self.assertRaises(FixedPointError):
                QFormat.parse(text)
        with self.assertRaises(FixedPointError):
            QFormat(16, 16)

    def test_range_and_resolution(self):
        self.assertEqual(Q15.min_value, -1.0)
        self.assertEqual(Q15.max_value, 1.0 - 2 ** -15)
        self.assertEqual(DATA_FORMAT.resolution, 2 ** -16)
        self.assertEqual(DATA_FORMAT.min_value, -128.0)

    def test_default_is_datapath_format(self):
        self.assertEqual(QFormat(), QFormat(24, 16))

    def test_coefficient_format_has_headroom(self):
        self.assertEqual(coefficient_format(Q15), QFormat(16, 13))

    def test_sample_must_fit(self):
        with self.assertRaises(FixedPointError):
            QSample(40000, Q15)


class QuantizeTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(quantize(0.5, Q15).raw, 16384)
        self.assertEqual(quantize(1.0, Q15).raw, 32767)
        self.assertEqual(quantize(-1.0, Q15).raw, -32768)

    def test_round_half_even(self):
        # 2.5 LSB and 3.5 LSB
        self.assertEqual(quantize(2.5 * 2 ** -15, Q15).raw, 2)
        self.assertEqual(quantize(3.5 * 2 ** -15, Q15).raw, 4)
        self.assertEqual(quantize(-2.5 * 2 ** -15, Q15).raw, -2)

    def test_infinities_saturate_and_nan_raises(self):
        self.assertEqual(quantize(math.inf, Q15).raw, Q15.raw_max)
        self.assertEqual(quantize(-math.inf, Q15).raw, Q15.raw_min)
        with self.assertRaises(FixedPointError):
            quantize(math.nan, Q15)

    def test_dequantize_examples(self):
        self.assertEqual(dequantize(QSample(16384, Q15)), 0.5)
        self.assertEqual(dequantize(QSample(0, DATA_FORMAT)), 0.0)
        self.assertEqual(dequantize(QSample(-32768, Q15)), -1.0)

    def test_representable_values_round_trip_exactly(self):
        for raw in (Q15.raw_min, -1, 0, 1, 12345, Q15.raw_max):
            value = dequantize(QSample(raw, Q15))
            self.assertEqual(dequantize(quantize(value, Q15)), value)

    def test_round_trip_within_half_lsb(self):
        rng = random.Random(7)
        for fmt in (Q15, DATA_FORMAT):
            half_lsb = 2.0 ** (-fmt.frac - 1)
            for _ in range(100000 // 2):
                v = rng.uniform(fmt.min_value, fmt.max_value)
                self.assertLessEqual(abs(dequantize(quantize(v, fmt)) - v), half_lsb)

    def test_rails_are_exact(self):
        self.assertEqual(quantize(Q15.max_value, Q15).raw, 32767)
        self.assertEqual(quantize(Q15.max_value + 2 ** -16, Q15).raw, 32767)
        self.assertEqual(quantize(5.0, Q15).raw, 32767)
        self.assertEqual(quantize(-1.0 - 2 ** -16, Q15).raw, -32768)
        self.assertEqual(quantize(-5.0, Q15).raw, -32768)


class ArithmeticTests(SimpleTestCase):

    def q(self, v):
        return quantize(v, Q15)

    def test_sat_add(self):
        self.assertEqual(sat_add(self.q(0.25), self.q(0.25)).raw, 16384)
        self.assertEqual(sat_add(QSample(30000, Q15), QSample(10000, Q15)).raw, 32767)
        self.assertEqual(sat_add(QSample(-30000, Q15), QSample(-10000, Q15)).raw, -32768)
        for raw in (-32768, -3, 0, 77, 32767):
            x = QSample(raw, Q15)
            self.assertEqual(sat_add(x, self.q(0.0)), x)

    def test_sat_sub(self):
        self.assertEqual(sat_sub(self.q(0.5), self.q(0.25)).raw, 8192)
        self.assertEqual(sat_sub(QSample(-32768, Q15), QSample(1, Q15)).raw, -32768)

    def test_sat_mul(self):
        self.assertEqual(sat_mul(self.q(0.5), self.q(0.5)).raw, 8192)
        self.assertEqual(sat_mul(self.q(0.3), self.q(0.0)).raw, 0)
        self.assertEqual(sat_mul(self.q(-1.0), self.q(-1.0)).raw, 32767)

    def test_format_mismatch(self):
        with self.assertRaises(FixedPointError):
            sat_add(self.q(0.1), quantize(0.1, DATA_FORMAT))
        with self.assertRaises(FixedPointError):
            sat_mul(self.q(0.1), quantize(0.1, DATA_FORMAT))

    def test_results_never_leave_range(self):
        rng = random.Random(3)
        for _ in range(2000):
            a = QSample(rng.randint(Q15.raw_min, Q15.raw_max), Q15)
            b = QSample(rng.randint(Q15.raw_min, Q15.raw_max), Q15)
            for r in (sat_add(a, b), sat_mul(a, b)):
                self.assertTrue(Q15.raw_min <= r.raw <= Q15.raw_max)

    def test_mul_matches_rational_oracle(self):
        rng = random.Random(11)
        scale = 1 << Q15.frac
        for _ in range(2000):
            a = QSample(rng.randint(-32768, 32767), Q15)
            b = QSample(rng.randint(-32768, 32767), Q15)
            exact = Fraction(a.raw, scale) * Fraction(b.raw, scale) * scale
            expected = round(exact)  # Fraction rounds half to even
            if Q15.raw_min <= expected <= Q15.raw_max:
                self.assertEqual(sat_mul(a, b).raw, expected)

    def test_rounding_helpers(self):
        self.assertEqual(round_shift(3, 1), 2)
        self.assertEqual(round_shift(5, 1), 2)
        self.assertEqual(round_shift(-3, 1), -2)
        self.assertEqual(round_shift(7, 2), 2)
        self.assertEqual(round_shift(3, -2), 12)
        self.assertEqual(round_div(7, 2), 4)
        self.assertEqual(round_div(-7, 2), -4)
        self.assertEqual(round_div(10, 4), 2)

    def test_dot_single_rounding(self):
        coeffs = [self.q(0.5), self.q(0.5)]
        samples = [QSample(1, Q15), QSample(0, Q15)]
        # 0.5 LSB rounds to the even neighbour 0, not to 1
        self.assertEqual(dot(coeffs, samples, Q15).raw, 0)
        samples = [QSample(1, Q15), QSample(1, Q15)]
        self.assertEqual(dot(coeffs, samples, Q15).raw, 1)

    def test_dot_mixed_coefficient_format(self):
        cfmt = coefficient_format(Q15)
        coeffs = [quantize(2.0, cfmt)]
        self.assertEqual(dot(coeffs, [self.q(0.25)], Q15).raw, 16384)
