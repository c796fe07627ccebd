import os
import tempfile
from dataclasses import replace

from django.test import SimpleTestCase

from fixedpoint.qformat import DATA_FORMAT, Q15, QSample, quantize
from .generators import (
    Lcg31, SignalConfig, gen_impulse, gen_step, gen_test_signal, noise_term, phase_seeds,
)
from .metrics import mse
from .traces import SignalError, Trace


def trace(values, fmt=Q15):
    return Trace.of([quantize(v, fmt) for v in values], fmt)


class LcgTests(SimpleTestCase):

    def test_first_draws(self):
        rng = Lcg31(1)
        self.assertEqual(rng.next(), (1103515245 + 12345) % 2 ** 31)
        second = (1103515245 * rng.state + 12345) % 2 ** 31
        self.assertEqual(rng.next(), second)

    def test_same_seed_same_stream(self):
        a, b = Lcg31(42), Lcg31(42)
        self.assertEqual([a.next() for _ in range(50)], [b.next() for _ in range(50)])

    def test_uniform_bounds(self):
        rng = Lcg31(5)
        for _ in range(1000):
            u = rng.uniform(-0.5, 0.5)
            self.assertTrue(-0.5 <= u < 0.5)


class TestSignalTests(SimpleTestCase):

    def test_config_validation(self):
        with self.assertRaises(SignalError):
            SignalConfig(freq=600.0).validate()
        with self.assertRaises(SignalError):
            SignalConfig(amplitude=0.98, noise_amp=0.05).validate()
        with self.assertRaises(SignalError):
            SignalConfig(n_steps=0).validate()
        SignalConfig().validate()

    def test_vanishing_terms_give_zero_sample(self):
        self.assertEqual(noise_term(500, 0.05), 0.0)
        self.assertEqual(noise_term(1500, 0.05), 0.0)
        seed = next(s for s in range(100000) if Lcg31(s).next() % 1000 == 500)
        x = gen_test_signal(SignalConfig(n_steps=1, seed=seed))
        self.assertEqual(x[0].raw, 0)

    def test_quarter_rate_peak(self):
        cfg = SignalConfig(amplitude=0.5, freq=250.0, noise_amp=0.0, n_steps=4)
        x = gen_test_signal(cfg)
        self.assertEqual(x[1], quantize(0.5, Q15))

    def test_default_trace_is_bounded(self):
        x = gen_test_signal(SignalConfig())
        self.assertEqual(len(x), 2000)
        limit = quantize(0.65, Q15).raw
        self.assertLessEqual(max(abs(r) for r in x.raws()), limit)

    def test_noise_is_bounded_half_open(self):
        values = [noise_term(k, 0.05) for k in range(1000)]
        self.assertEqual(min(values), -0.05)
        self.assertLess(max(values), 0.05)
        self.assertAlmostEqual(sum(values) / 1000, -0.05 / 1000, places=12)

    def test_determinism(self):
        cfg = SignalConfig(seed=9)
        self.assertEqual(gen_test_signal(cfg), gen_test_signal(cfg))
        self.assertNotEqual(gen_test_signal(cfg), gen_test_signal(replace(cfg, seed=10)))

    def test_phase_seeds(self):
        self.assertEqual(phase_seeds(4), (4, 5))


class ImpulseStepTests(SimpleTestCase):

    def test_impulse(self):
        x = gen_impulse(4, 1.0, Q15)
        self.assertEqual(x.raws(), [32767, 0, 0, 0])
        self.assertEqual(gen_impulse(1, 0.5, Q15).raws(), [16384])
        self.assertEqual(sum(x.raws()), x[0].raw)

    def test_step(self):
        self.assertEqual(gen_step(3, 0.5, Q15).raws(), [16384] * 3)
        self.assertEqual(gen_step(5, 0.0, DATA_FORMAT).raws(), [0] * 5)

    def test_step_is_running_sum_of_impulse(self):
        impulse = gen_impulse(6, 0.25, Q15).raws()
        running = [sum(impulse[:n + 1]) for n in range(6)]
        self.assertEqual(gen_step(6, 0.25, Q15).raws(), running)

    def test_empty_rejected(self):
        with self.assertRaises(SignalError):
            gen_impulse(0, 0.5, Q15)
        with self.assertRaises(SignalError):
            gen_step(0, 0.5, Q15)


class MseTests(SimpleTestCase):

    def test_examples(self):
        x = gen_test_signal(SignalConfig(n_steps=50))
        self.assertEqual(mse(x, x), 0.0)
        self.assertEqual(mse(trace([0, 0], DATA_FORMAT), trace([1, 1], DATA_FORMAT)), 1.0)
        self.assertEqual(mse(trace([0.5, 0]), trace([0, 0])), 0.125)

    def test_symmetric_and_non_negative(self):
        a = gen_test_signal(SignalConfig(n_steps=100, seed=1))
        b = gen_test_signal(SignalConfig(n_steps=100, seed=2))
        self.assertEqual(mse(a, b), mse(b, a))
        self.assertGreater(mse(a, b), 0.0)

    def test_mismatch_rejected(self):
        with self.assertRaises(SignalError):
            mse(trace([0.1, 0.2]), trace([0.1]))
        with self.assertRaises(SignalError):
            mse(trace([0.1]), trace([0.1], DATA_FORMAT))

    def test_trace_rejects_mixed_formats(self):
        with self.assertRaises(SignalError):
            Trace.of([QSample(1, Q15), QSample(1, DATA_FORMAT)], Q15)


class TraceCsvTests(SimpleTestCase):

    def test_csv_layout_and_reload(self):
        x = gen_test_signal(SignalConfig(n_steps=5))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'x.csv')
            x.to_csv(path)
            with open(path) as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], 'n,raw,value')
            self.assertEqual(len(lines), 6)
            self.assertEqual(Trace.from_csv(path, Q15), x)

    def test_unwritable_path(self):
        x = gen_impulse(2, 0.5, Q15)
        with self.assertRaises(SignalError):
            x.to_csv('/nonexistent-dir/x.csv')
