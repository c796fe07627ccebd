import math
import random
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from fixedpoint.qformat import (
    DATA_FORMAT, Q15, QFormat, QSample, coefficient_format, quantize, saturate,
)
from signals.generators import gen_impulse, gen_step
from signals.traces import Trace
from .analysis import (
    biquad_freq_response, fir_dc_gain, fir_freq_response, freq_sweep, gain_db, iir_freq_response,
)
from .coeff_utils import load_coefficients, parse_coefficients
from .design import design_lowpass_biquad, design_lowpass_fir
from .fir import FilterError, FirFilter, fir_step
from .iir import Biquad, BiquadCoeffs, IirDf2t, biquad_as_df2t, biquad_step, iir_df2t_step, is_stable


def _raws(trace):
    return [s.raw for s in trace]


def _random_trace(rng, n, fmt, amplitude=1.0):
    return Trace.of([quantize(rng.uniform(-amplitude, amplitude), fmt) for _ in range(n)], fmt)


class FirFilterTests(SimpleTestCase):

    def test_identity_filter(self):
        one = quantize(1.0, DATA_FORMAT)
        f = FirFilter([one], DATA_FORMAT)
        x = _random_trace(random.Random(1), 50, DATA_FORMAT, 100.0)
        self.assertEqual(_raws(f.run(x)), _raws(x))

    def test_two_tap_average_of_step(self):
        f = FirFilter([quantize(0.5, Q15)] * 2, Q15)
        y = f.run(gen_step(4, 1.0, Q15))
        self.assertEqual(_raws(y), [16384, 32767, 32767, 32767])

    def test_impulse_response_is_coefficients(self):
        h = [quantize(0.25, Q15)] * 4
        y = FirFilter(h, Q15).run(gen_impulse(6, 0.5, Q15))
        self.assertEqual([v.value for v in y], [0.125] * 4 + [0.0] * 2)

        # q16.14 holds 1.0 exactly
        fmt = QFormat(16, 14)
        rng = random.Random(5)
        coeffs = [QSample(rng.randint(fmt.raw_min, fmt.raw_max), fmt) for _ in range(9)]
        y = FirFilter(coeffs, fmt).run(gen_impulse(9, 1.0, fmt))
        self.assertEqual(_raws(y), [c.raw for c in coeffs])

    def test_matches_convolution_oracle(self):
        rng = random.Random(42)
        scale = 1 << Q15.frac
        for _ in range(1000):
            taps = rng.randint(1, 8)
            coeffs = [QSample(rng.randint(-32768, 32767) // taps, Q15) for _ in range(taps)]
            x = [QSample(rng.randint(-32768, 32767), Q15) for _ in range(12)]
            y = FirFilter(coeffs, Q15).run(Trace.of(x, Q15))
            for n in range(len(x)):
                exact = sum(
                    Fraction(coeffs[k].raw * x[n - k].raw, scale)
                    for k in range(taps) if n - k >= 0
                )
                self.assertEqual(y[n].raw, saturate(round(exact), Q15))

    def test_delay_line_length_and_reset(self):
        f = FirFilter([quantize(0.1, Q15)] * 5, Q15)
        f.run(gen_step(20, 0.5, Q15))
        self.assertEqual(len(f.delay_line), 5)
        f.reset()
        self.assertTrue(all(s.raw == 0 for s in f.delay_line))

    def test_time_invariance(self):
        rng = random.Random(9)
        coeffs = [quantize(rng.uniform(-0.3, 0.3), Q15) for _ in range(7)]
        x = _random_trace(rng, 40, Q15, 0.5)
        delayed = Trace.of([QSample(0, Q15)] * 3 + list(x), Q15)
        y = FirFilter(coeffs, Q15).run(x)
        y_delayed = FirFilter(coeffs, Q15).run(delayed)
        self.assertEqual(_raws(y_delayed)[3:], _raws(y))
        self.assertEqual(_raws(y_delayed)[:3], [0, 0, 0])

    def test_negated_input_negates_output(self):
        rng = random.Random(10)
        coeffs = [quantize(rng.uniform(-0.2, 0.2), Q15) for _ in range(5)]
        x = _random_trace(rng, 60, Q15, 0.5)
        neg = Trace.of([QSample(-s.raw, Q15) for s in x], Q15)
        y = FirFilter(coeffs, Q15).run(x)
        y_neg = FirFilter(coeffs, Q15).run(neg)
        self.assertEqual(_raws(y_neg), [-r for r in _raws(y)])

    def test_format_mismatch(self):
        f = FirFilter([quantize(0.5, Q15)], Q15)
        with self.assertRaises(FilterError):
            f.step(quantize(0.5, DATA_FORMAT))

    def test_bad_coefficients(self):
        with self.assertRaises(FilterError):
            FirFilter([], Q15)
        with self.assertRaises(FilterError):
            FirFilter([quantize(0.5, Q15), quantize(0.5, DATA_FORMAT)], Q15)
        with self.assertRaises(FilterError):
            FirFilter([quantize(0.5, DATA_FORMAT)], Q15)


class IirTests(SimpleTestCase):

    cfmt = coefficient_format(Q15)

    def coeffs(self, g=1.0, beta1=0.0, beta2=0.0, a1=0.0, a2=0.0, fmt=None):
        fmt = fmt or self.cfmt
        return BiquadCoeffs(*(quantize(v, fmt) for v in (g, beta1, beta2, a1, a2)))

    def test_passthrough(self):
        x = _random_trace(random.Random(2), 30, Q15)
        self.assertEqual(_raws(Biquad(self.coeffs(), Q15).run(x)), _raws(x))
        df2t = IirDf2t([quantize(1.0, self.cfmt)], [], Q15)
        self.assertEqual(_raws(df2t.run(x)), _raws(x))

    def test_step_functions_match_methods(self):
        x = _random_trace(random.Random(5), 25, Q15, amplitude=0.5)
        c = self.coeffs(g=0.25, beta1=2.0, beta2=1.0, a1=-0.5, a2=0.25)
        b, a = biquad_as_df2t(c)
        taps = [quantize(v, Q15) for v in (0.25, 0.5, 0.25)]
        pairs = (
            (Biquad(c, Q15), Biquad(c, Q15), biquad_step),
            (IirDf2t(b, a, Q15), IirDf2t(b, a, Q15), iir_df2t_step),
            (FirFilter(taps, Q15), FirFilter(taps, Q15), fir_step),
        )
        for by_method, by_function, step in pairs:
            self.assertEqual([step(by_function, s) for s in x], list(by_method.run(x)))

    def test_zero_input_gives_zero_output(self):
        zeros = Trace.of([QSample(0, Q15)] * 20, Q15)
        biquad = Biquad(self.coeffs(g=0.3, beta1=2.0, beta2=1.0, a1=-1.1, a2=0.4), Q15)
        self.assertEqual(_raws(biquad.run(zeros)), [0] * 20)

    def _decay_oracle(self, n):
        expected, y = [], Fraction(0)
        x = Fraction(Q15.raw_max)
        for _ in range(n):
            y = Fraction(round(x / 2 + y / 2))
            expected.append(int(y))
            x = Fraction(0)
        return expected

    def test_geometric_decay(self):
        impulse = Trace.of([QSample(Q15.raw_max, Q15)] + [QSample(0, Q15)] * 19, Q15)
        expected = self._decay_oracle(20)
        self.assertEqual(expected[:3], [16384, 8192, 4096])

        biquad = Biquad(self.coeffs(g=0.5, a1=-0.5), Q15)
        self.assertEqual(_raws(biquad.run(impulse)), expected)

        df2t = IirDf2t([quantize(0.5, self.cfmt)], [quantize(-0.5, self.cfmt)], Q15)
        self.assertEqual(_raws(df2t.run(impulse)), expected)

    def test_df1_and_df2t_agree(self):
        rng = random.Random(17)
        cfmt = coefficient_format(DATA_FORMAT)
        for _ in range(100):
            r = rng.uniform(0.0, 0.8)
            theta = rng.uniform(0.0, math.pi)
            coeffs = self.coeffs(
                g=1.0,
                beta1=rng.uniform(-2, 2),
                beta2=rng.uniform(-1, 1),
                a1=-2 * r * math.cos(theta),
                a2=r * r,
                fmt=cfmt,
            )
            x = _random_trace(rng, 64, DATA_FORMAT, 0.5)
            b, a = biquad_as_df2t(coeffs)
            y_df1 = Biquad(coeffs, DATA_FORMAT).run(x)
            y_df2t = IirDf2t(b, a, DATA_FORMAT).run(x)
            self.assertEqual(_raws(y_df1), _raws(y_df2t))

    def test_state_length_fixed_and_reset(self):
        b = [quantize(v, self.cfmt) for v in (0.2, 0.1, 0.05, 0.01)]
        a = [quantize(-0.3, self.cfmt)]
        f = IirDf2t(b, a, Q15)
        self.assertEqual(len(f.state), 3)
        f.run(gen_step(10, 0.5, Q15))
        self.assertEqual(len(f.state), 3)
        f.reset()
        self.assertEqual(f.state, [0, 0, 0])

    def test_unstable_coefficients_rejected(self):
        self.assertFalse(is_stable(-2.1, 1.2))
        self.assertTrue(is_stable(-1.14, 0.41))
        with self.assertRaises(FilterError):
            self.coeffs(a1=-1.9, a2=1.0)
        # allowed when not flagged stable
        c = BiquadCoeffs(*(quantize(v, self.cfmt) for v in (1.0, 0.0, 0.0, -1.9, 1.0)), stable=False)
        self.assertFalse(c.stable)

    def test_format_mismatch(self):
        biquad = Biquad(self.coeffs(), Q15)
        with self.assertRaises(FilterError):
            biquad.step(quantize(0.1, DATA_FORMAT))
        with self.assertRaises(FilterError):
            Biquad(self.coeffs(), DATA_FORMAT)


class AnalysisTests(SimpleTestCase):

    def test_two_tap_response(self):
        h = [0.5, 0.5]
        self.assertAlmostEqual(abs(fir_freq_response(h, 0.0) - 1.0), 0.0, places=12)
        self.assertAlmostEqual(abs(fir_freq_response(h, math.pi)), 0.0, places=12)

    def test_matches_dft(self):
        h = [quantize(0.25, Q15)] * 4
        spectrum = np.fft.fft([0.25] * 4 + [0.0] * 508)
        self.assertAlmostEqual(abs(fir_freq_response(h, math.pi / 2)), abs(spectrum[128]), delta=1e-12)

    def test_omega_out_of_range(self):
        with self.assertRaises(FilterError):
            fir_freq_response([0.5], -0.1)
        with self.assertRaises(FilterError):
            fir_freq_response([0.5], math.pi + 0.01)

    def test_dc_gain(self):
        self.assertEqual(fir_dc_gain([0.25] * 4), 1.0)
        self.assertEqual(fir_dc_gain([0.0]), 0.0)
        rng = random.Random(4)
        for _ in range(20):
            h = [quantize(rng.uniform(-1, 1), Q15) for _ in range(rng.randint(1, 16))]
            self.assertAlmostEqual(abs(fir_dc_gain(h)), abs(fir_freq_response(h, 0.0)), delta=1e-12)

    def test_gain_db(self):
        self.assertEqual(gain_db(1.0), 0.0)
        self.assertAlmostEqual(gain_db(10.0), 20.0, places=12)
        self.assertAlmostEqual(gain_db(0.5), -6.0206, delta=1e-4)
        for bad in (0.0, -1.0):
            with self.assertRaises(FilterError):
                gain_db(bad)

    def test_iir_response(self):
        # 0.5 / (1 - 0.5 z^-1) has unit DC gain
        self.assertAlmostEqual(abs(iir_freq_response([0.5], [-0.5], 0.0)), 1.0, places=12)
        self.assertAlmostEqual(abs(iir_freq_response([0.5], [-0.5], math.pi)), 1 / 3, places=12)

    def test_freq_sweep_rows(self):
        rows = freq_sweep([0.5, 0.5], points=8)
        self.assertEqual(len(rows), 8)
        self.assertEqual(rows[0][0], 0)
        self.assertEqual(rows[0][1], 0.0)
        self.assertAlmostEqual(rows[0][2], 1.0, places=12)
        self.assertAlmostEqual(rows[0][3], 0.0, places=9)
        for k, omega, magnitude, _ in rows:
            self.assertAlmostEqual(magnitude, abs(fir_freq_response([0.5, 0.5], omega)), places=12)
        with self.assertRaises(FilterError):
            freq_sweep([0.5], points=0)


class DesignTests(SimpleTestCase):

    def test_single_tap(self):
        h = design_lowpass_fir(1, 0.2, Q15)
        self.assertEqual([c.raw for c in h], [Q15.raw_max])

    def test_fir_dc_gain(self):
        for taps in (3, 7, 15, 31):
            for cutoff in (0.05, 0.1, 0.25, 0.4):
                for fmt in (Q15, DATA_FORMAT):
                    h = design_lowpass_fir(taps, cutoff, fmt)
                    self.assertEqual(len(h), taps)
                    self.assertLessEqual(abs(fir_dc_gain(h) - 1.0), taps * 2.0 ** -fmt.frac)

    def test_fir_stopband(self):
        h = design_lowpass_fir(15, 0.1, Q15)
        stop = abs(fir_freq_response(h, 0.8 * math.pi))
        self.assertLessEqual(gain_db(stop) - gain_db(fir_dc_gain(h)), -20.0)

    def test_fir_is_symmetric(self):
        h = design_lowpass_fir(15, 0.1, DATA_FORMAT)
        for a, b in zip(h, reversed(h)):
            self.assertLessEqual(abs(a.raw - b.raw), 1)

    def test_fir_bad_parameters(self):
        for taps, cutoff in ((4, 0.1), (0, 0.1), (15, 0.0), (15, 0.5), (15, -0.2)):
            with self.assertRaises(FilterError):
                design_lowpass_fir(taps, cutoff, Q15)

    def test_biquad_unit_dc_gain_and_stable(self):
        for fmt in (Q15, DATA_FORMAT):
            for cutoff in (0.02, 0.1, 0.2, 0.25, 0.4):
                for q in (0.5, 1 / math.sqrt(2), 1.0, 2.0):
                    coeffs = design_lowpass_biquad(cutoff, q, fmt)
                    self.assertEqual(coeffs.fmt, coefficient_format(fmt))
                    c = coeffs.as_floats()
                    self.assertTrue(is_stable(c['a1'], c['a2']))
                    dc = abs(biquad_freq_response(coeffs, 0.0))
                    self.assertLessEqual(abs(dc - 1.0), 2.0 ** (-fmt.frac + 2))

    def test_biquad_half_power_at_cutoff(self):
        coeffs = design_lowpass_biquad(0.25, 1 / math.sqrt(2), Q15)
        magnitude = abs(biquad_freq_response(coeffs, 2 * math.pi * 0.25))
        self.assertAlmostEqual(magnitude, 1 / math.sqrt(2), delta=0.01 / math.sqrt(2))

    def test_biquad_runs_at_unit_dc(self):
        coeffs = design_lowpass_biquad(0.1, 1 / math.sqrt(2), Q15)
        y = Biquad(coeffs, Q15).run(gen_step(300, 0.5, Q15))
        self.assertAlmostEqual(y[-1].value, 0.5, delta=2e-3)

    def test_biquad_bad_parameters(self):
        for cutoff, q in ((0.0, 0.7), (0.5, 0.7), (0.1, 0.0), (0.1, -1.0)):
            with self.assertRaises(FilterError):
                design_lowpass_biquad(cutoff, q, Q15)


class CoefficientFileTests(SimpleTestCase):

    def test_parse_with_comments(self):
        text = "# taps\n0.25\n\n0.5  # centre\n0.25\n"
        coeffs = parse_coefficients(text, Q15)
        self.assertEqual([c.raw for c in coeffs], [8192, 16384, 8192])

    def test_bad_line_reports_number(self):
        with self.assertRaisesMessage(FilterError, "line 2"):
            parse_coefficients("0.1\nabc\n", Q15)

    def test_empty_file(self):
        with self.assertRaises(FilterError):
            parse_coefficients("# nothing\n", Q15)

    def test_load_from_disk(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'h.txt'
            path.write_text("0.5\n0.5\n")
            self.assertEqual(len(load_coefficients(path, Q15)), 2)
            with self.assertRaises(FilterError):
                load_coefficients(Path(tmp) / 'missing.txt', Q15)
