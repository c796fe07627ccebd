import hashlib
import math
import random
import tempfile
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from filters_classic.design import design_lowpass_biquad, design_lowpass_fir
from filters_classic.fir import FirFilter
from filters_classic.iir import Biquad
from fixedpoint.qformat import DATA_FORMAT, Q15, QFormat, QSample, activation_format, quantize
from signals.generators import SignalConfig, gen_test_signal
from signals.metrics import mse
from signals.traces import Trace
from .networks import (
    ElmanNet, Mode, NeuroFir, WeightStorage, nfir_forward, nfir_train_step, niir_forward, niir_train_step,
)
from .tanh_lut import NeuroFilterError, TanhLut, tanh_lut
from .weights import init_weights, read_weights, write_weights

ACT = activation_format(Q15)
LUT = TanhLut(Q15)


def _task(seed=1, n_steps=2000):
    x = gen_test_signal(SignalConfig(seed=seed, n_steps=n_steps))
    fir = FirFilter(design_lowpass_fir(15, 0.1, Q15), Q15).run(x)
    iir = Biquad(design_lowpass_biquad(0.1, 1 / math.sqrt(2), Q15), Q15).run(x)
    return x, fir, iir


def _snapshot(net):
    return {name: [[w.raw for w in row] for row in rows] for name, rows in net.weight_matrices().items()}


def _squared_errors(net, x, desired):
    errors = []
    for xn, dn in zip(x, desired):
        _, err = net.train_step(xn, dn)
        errors.append(err.value ** 2)
    return errors


class TanhLutTests(SimpleTestCase):

    def test_table_shape(self):
        self.assertEqual(len(LUT), 1024)
        self.assertEqual(LUT.in_fmt, QFormat(16, 12))
        raws = [e.raw for e in LUT.entries]
        self.assertEqual(raws, [-r for r in reversed(raws)])
        self.assertTrue(all(a <= b for a, b in zip(raws, raws[1:])))

    def test_zero_and_saturation(self):
        self.assertEqual(tanh_lut(QSample(0, ACT), LUT).raw, 0)
        self.assertEqual(LUT(quantize(10.0, ACT)).raw, 32767)
        self.assertEqual(LUT(quantize(-10.0, ACT)).raw, -32767)
        self.assertEqual(LUT(QSample(ACT.raw_min, ACT)).raw, -32767)

    def test_dense_sweep_accuracy(self):
        worst = 0.0
        previous = None
        for raw in range(ACT.raw_min, ACT.raw_max + 1):
            x = QSample(raw, ACT)
            y = LUT(x)
            worst = max(worst, abs(y.value - math.tanh(x.value)))
            if previous is not None:
                self.assertGreaterEqual(y.raw, previous)
            previous = y.raw
        self.assertLessEqual(worst, 2 ** -10)

    def test_wide_format_accuracy_and_odd_symmetry(self):
        lut = TanhLut(DATA_FORMAT)
        act = lut.in_fmt
        rng = random.Random(6)
        for _ in range(20000):
            x = QSample(rng.randint(act.raw_min + 1, act.raw_max), act)
            y = lut(x)
            self.assertLessEqual(abs(y.value - math.tanh(x.value)), 2 ** -10)
            self.assertEqual(lut(QSample(-x.raw, act)).raw, -y.raw)

    def test_format_mismatch(self):
        with self.assertRaises(NeuroFilterError):
            LUT(quantize(0.1, Q15))
        with self.assertRaises(NeuroFilterError):
            TanhLut(Q15, size=1)


class InitWeightsTests(SimpleTestCase):

    def test_deterministic_and_bounded(self):
        a = init_weights(5, (8, 15), Q15)
        b = init_weights(5, (8, 15), Q15)
        self.assertEqual(a, b)
        self.assertEqual((len(a), len(a[0])), (8, 15))
        self.assertTrue(all(-0.5 <= w.value <= 0.5 for row in a for w in row))

    def test_seeds_differ(self):
        digests = set()
        for seed in range(10):
            raws = [w.raw for row in init_weights(seed, (4, 4), Q15) for w in row]
            digests.add(hashlib.sha256(repr(raws).encode()).hexdigest())
        self.assertEqual(len(digests), 10)

    def test_row_sum_guard(self):
        for seed in range(20):
            for fmt in (Q15, DATA_FORMAT):
                for row in init_weights(seed, (4, 4), fmt, row_sum_limit=0.9):
                    self.assertLessEqual(sum(abs(w.raw) for w in row), 0.9 * (1 << fmt.frac))

    def test_bad_dims(self):
        with self.assertRaises(NeuroFilterError):
            init_weights(1, (0, 3), Q15)

    def test_snapshot_file(self):
        weights = init_weights(3, (2, 3), Q15)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'w.txt'
            write_weights(path, weights)
            self.assertTrue(path.read_text(encoding='utf-8').startswith("format q16.15 dims 2×3\n"))
            self.assertEqual(read_weights(path), weights)
            path.write_text("format real dims 1×1\n0.5\n", encoding='utf-8')
            with self.assertRaises(NeuroFilterError):
                read_weights(path)
        with self.assertRaises(NeuroFilterError):
            write_weights(Path('unused'), [[QSample(0, Q15)], [QSample(0, Q15), QSample(0, Q15)]])


class NeuroFirTests(SimpleTestCase):

    def test_zero_output_weights(self):
        net = NeuroFir(15, Q15)
        x, _, _ = _task(n_steps=50)
        self.assertTrue(all(nfir_forward(net, s).raw == 0 for s in x))

    def test_zero_input_gives_zero(self):
        net = NeuroFir(15, Q15)
        net.w_out = [quantize(0.3, Q15)] * net.n_hidden
        self.assertEqual(net.forward(QSample(0, Q15)).raw, 0)
        self.assertTrue(all(h.raw == 0 for h in net.hidden))

    def test_replay_is_bit_exact(self):
        x, fir, _ = _task(n_steps=300)
        runs = []
        for _ in range(2):
            net = NeuroFir(15, Q15, seed=9)
            outputs = [nfir_train_step(net, xn, dn)[0].raw for xn, dn in zip(x, fir)]
            runs.append((outputs, _snapshot(net)))
        self.assertEqual(runs[0], runs[1])

    def test_first_step_update(self):
        net = NeuroFir(15, Q15, mu=0.5)
        desired = quantize(0.25, Q15)
        y, err = net.train_step(quantize(0.6, Q15), desired)
        self.assertEqual(y.raw, 0)
        self.assertEqual(err, desired)
        for w, h in zip(net.w_out, net.hidden):
            self.assertLessEqual(abs(w.value - 0.5 * 0.25 * h.value), 2 ** -16)

    def test_zero_error_leaves_weights(self):
        net = NeuroFir(15, Q15)
        before = _snapshot(net)
        _, err = net.train_step(quantize(0.6, Q15), QSample(0, Q15))
        self.assertEqual(err.raw, 0)
        self.assertEqual(_snapshot(net), before)

    def test_infer_mode(self):
        x, fir, _ = _task(n_steps=200)
        net = NeuroFir(15, Q15)
        _squared_errors(net, x, fir)
        net.set_mode(Mode.INFER)
        before = _snapshot(net)
        for s in x:
            net.forward(s)
        self.assertEqual(_snapshot(net), before)
        with self.assertRaises(NeuroFilterError):
            net.train_step(x[0], fir[0])
        with self.assertRaises(NeuroFilterError):
            net.set_mode('sleep')

    def test_learning_curve(self):
        x, fir, _ = _task()
        errors = _squared_errors(NeuroFir(15, Q15), x, fir)
        self.assertLess(sum(errors[-100:]), sum(errors[:100]))

    def test_progress_over_seeds(self):
        improved = 0
        for seed in range(10):
            x, fir, _ = _task(seed=seed + 100, n_steps=1000)
            errors = _squared_errors(NeuroFir(15, Q15, seed=seed), x, fir)
            improved += sum(errors[-100:]) < sum(errors[:100])
        self.assertGreaterEqual(improved, 9)

    def test_reset(self):
        x, _, _ = _task(n_steps=20)
        net = NeuroFir(15, Q15)
        for s in x:
            net.forward(s)
        net.reset()
        self.assertTrue(all(s.raw == 0 for s in net.delay_line))
        self.assertTrue(all(h.raw == 0 for h in net.hidden))
        self.assertEqual(len(net.delay_line), 15)

    def test_crossbar_storage(self):
        x, fir, _ = _task(n_steps=600)
        net = NeuroFir(15, Q15, storage='crossbar')
        errors = _squared_errors(net, x, fir)
        self.assertLess(sum(errors[-100:]), sum(errors[:100]))
        full_scale = max(1.0, max(abs(w.value) for w in net.w_out))
        for reg, seen in zip(net.w_out, net.effective_out()):
            self.assertLessEqual(abs(reg.value - seen.value), full_scale / 255 + 2 ** -15)

    def test_bad_arguments(self):
        with self.assertRaises(NeuroFilterError):
            NeuroFir(15, Q15, storage='flash')
        with self.assertRaises(NeuroFilterError):
            NeuroFir(0, Q15)
        with self.assertRaises(NeuroFilterError):
            NeuroFir(15, Q15, mu=0.0)
        with self.assertRaises(NeuroFilterError):
            NeuroFir(15, Q15).forward(quantize(0.1, DATA_FORMAT))

    @override_settings(NEURODSP={**settings.NEURODSP, 'NFIR_HIDDEN': 3, 'WEIGHT_STORAGE': 'crossbar'})
    def test_from_settings(self):
        net = NeuroFir.from_settings(15, Q15, seed=2)
        self.assertEqual(net.n_hidden, 3)
        self.assertEqual(net.storage, WeightStorage.CROSSBAR)
        self.assertEqual(net.mu.value, 2 ** -6)


class ElmanNetTests(SimpleTestCase):

    def test_row_sums(self):
        for seed in range(10):
            net = ElmanNet(Q15, seed=seed)
            for row in net.w_rec:
                self.assertLessEqual(sum(abs(w.value) for w in row), 0.9)

    def test_all_zero_weights(self):
        net = ElmanNet(Q15)
        zero = QSample(0, Q15)
        net.w_in = [zero] * 4
        net.w_rec = tuple((zero,) * 4 for _ in range(4))
        x, _, _ = _task(n_steps=50)
        for s in x:
            self.assertEqual(niir_forward(net, s).raw, 0)
            self.assertTrue(all(h.raw == 0 for h in net.h))

    def test_no_recurrence_is_memoryless(self):
        net = ElmanNet(Q15)
        zero = QSample(0, Q15)
        net.w_rec = tuple((zero,) * 4 for _ in range(4))
        net.w_out = [quantize(v, Q15) for v in (0.4, -0.3, 0.2, 0.1)]
        probe = quantize(0.37, Q15)
        reference = net.forward(probe)
        x, _, _ = _task(n_steps=30)
        for s in x:
            net.forward(s)
            self.assertEqual(net.forward(probe), reference)

    def test_output_is_bounded(self):
        rng = random.Random(12)
        for seed in range(5):
            net = ElmanNet(Q15, seed=seed)
            net.w_out = [quantize(rng.uniform(-0.9, 0.9), Q15) for _ in range(4)]
            bound = sum(abs(w.value) for w in net.w_out) * (1 - 2 ** -15) + 2 ** -16
            for _ in range(300):
                y = net.forward(QSample(rng.randint(Q15.raw_min, Q15.raw_max), Q15))
                self.assertLessEqual(abs(y.value), bound)
                self.assertTrue(all(abs(h.raw) < 1 << 15 for h in net.h))

    def test_first_step_only_touches_output_weights(self):
        net = ElmanNet(Q15)
        w_in = list(net.w_in)
        niir_train_step(net, quantize(0.5, Q15), quantize(0.3, Q15))
        self.assertEqual(net.w_in, w_in)
        self.assertTrue(any(w.raw != 0 for w in net.w_out))

    def test_second_step_adapts_input_weights(self):
        net = ElmanNet(Q15, mu=0.5)
        w_in = list(net.w_in)
        net.train_step(quantize(0.5, Q15), quantize(0.9, Q15))
        net.train_step(quantize(0.5, Q15), quantize(0.9, Q15))
        self.assertNotEqual(net.w_in, w_in)

    def test_zero_error_leaves_weights(self):
        net = ElmanNet(Q15)
        before = _snapshot(net)
        net.train_step(quantize(0.2, Q15), QSample(0, Q15))
        self.assertEqual(_snapshot(net), before)

    def test_training_beats_untrained_copy(self):
        x_train, _, iir_train = _task(seed=1)
        x_test, _, iir_test = _task(seed=2)
        trained, untrained = ElmanNet(Q15), ElmanNet(Q15)
        _squared_errors(trained, x_train, iir_train)
        results = {}
        for name, net in (('trained', trained), ('untrained', untrained)):
            net.set_mode('infer')
            net.reset()
            y = [net.forward(s) for s in x_test]
            results[name] = mse(Trace.of(y, Q15), iir_test)
        self.assertLess(results['trained'], results['untrained'])

    def test_reset_and_infer(self):
        net = ElmanNet(Q15)
        net.forward(quantize(0.8, Q15))
        self.assertTrue(any(h.raw for h in net.h))
        net.reset()
        self.assertTrue(all(h.raw == 0 for h in net.h))
        net.set_mode('infer')
        with self.assertRaises(NeuroFilterError):
            net.train_step(quantize(0.1, Q15), quantize(0.1, Q15))

    def test_crossbar_zero_weights_read_back_as_zero(self):
        net = ElmanNet(Q15, storage=WeightStorage.CROSSBAR)
        self.assertTrue(all(w.raw == 0 for w in net.effective_out()))
