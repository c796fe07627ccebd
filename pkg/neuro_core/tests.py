import csv
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings
from django.conf import settings

from fixedpoint.qformat import Q15, quantize
from signals.generators import gen_step
from signals.traces import Trace
from .coding import rate_decode, rate_encode, spiking_output_stage, write_spike_csv
from .lif import (
    LifParams, LifState, NeuronError, firing_rate, isi_closed_form, lif_run, lif_step, lif_trace,
    spike_times,
)


FAST = LifParams(tau=0.01, dt=0.0001)


class LifParamsTests(SimpleTestCase):

    def test_defaults(self):
        p = LifParams()
        self.assertEqual((p.tau, p.v_rest, p.r_mem, p.v_th, p.v_reset, p.t_ref, p.dt),
                         (0.01, 0.0, 1.0, 1.0, 0.0, 0.0, 0.001))
        self.assertEqual(p.capacitance, 0.01)

    def test_invalid(self):
        bad = (
            {'tau': 0.0},
            {'dt': 0.0},
            {'dt': 0.006},
            {'v_th': 0.0},
            {'v_reset': -0.5},
            {'t_ref': -0.001},
        )
        for kwargs in bad:
            with self.assertRaises(NeuronError):
                LifParams(**kwargs)

    @override_settings(NEURODSP={**settings.NEURODSP, 'LIF_TAU': 0.02})
    def test_from_settings(self):
        p = LifParams.from_settings(dt=0.0005)
        self.assertEqual(p.tau, 0.02)
        self.assertEqual(p.dt, 0.0005)


class LifStepTests(SimpleTestCase):

    def test_rest_is_fixed_point(self):
        p = LifParams()
        state = LifState.at_rest(p)
        for _ in range(100):
            state, spiked = lif_step(state, p, 0.0)
            self.assertFalse(spiked)
        self.assertEqual(state.v, p.v_rest)

    def test_subthreshold_converges_to_drive(self):
        p = LifParams()
        voltages, spikes = lif_trace(p, [0.5] * 200)
        self.assertFalse(any(spikes))
        self.assertTrue(all(a < b for a, b in zip(voltages, voltages[1:]) if b < 0.5 - 1e-12))
        for n, v in enumerate(voltages, start=1):
            self.assertAlmostEqual(v, 0.5 * (1 - 0.9 ** n), delta=1e-12)
        self.assertAlmostEqual(voltages[-1], 0.5, delta=1e-9)

    def test_at_threshold_spikes_immediately(self):
        p = LifParams()
        state, spiked = lif_step(LifState(v=p.v_th), p, 0.0)
        self.assertTrue(spiked)
        self.assertEqual(state.v, p.v_reset)

    def test_leak_never_crosses_rest(self):
        p = LifParams()
        state = LifState(v=0.8)
        previous = state.v
        for _ in range(300):
            state, _ = lif_step(state, p, 0.0)
            self.assertLess(state.v, previous)
            self.assertGreater(state.v, p.v_rest)
            previous = state.v

    def test_refractory_blocks_spikes(self):
        p = LifParams(t_ref=0.005)
        state, spikes = LifState.at_rest(p), []
        for _ in range(400):
            state, spiked = lif_step(state, p, 5.0)
            self.assertGreaterEqual(state.refractory_remaining, 0.0)
            self.assertLessEqual(state.refractory_remaining, p.t_ref)
            spikes.append(spiked)
        times = spike_times(spikes)
        self.assertGreater(len(times), 2)
        self.assertTrue(all(b - a > 5 for a, b in zip(times, times[1:])))


class LifRunTests(SimpleTestCase):

    def test_zero_current(self):
        self.assertEqual(lif_run(LifParams(), [0.0] * 50), [False] * 50)

    def test_isi_matches_closed_form(self):
        times = spike_times(lif_run(FAST, [2.0] * 1000))
        self.assertGreaterEqual(len(times), 10)
        expected_steps = isi_closed_form(FAST, 2.0) / FAST.dt
        self.assertAlmostEqual(expected_steps, 69.3, delta=0.05)
        for a, b in zip(times, times[1:]):
            self.assertLessEqual(abs((b - a) - expected_steps), 2)
        self.assertEqual(times[1] - times[0], 69)

    def test_potential_stays_below_threshold_between_spikes(self):
        for p in (LifParams(), FAST, LifParams(t_ref=0.003, v_reset=0.2)):
            for current in (1.01, 1.5, 2.0, 5.0, 50.0):
                voltages, spikes = lif_trace(p, [current] * 2000)
                self.assertGreater(sum(spikes), 0)
                for n, (v, s) in enumerate(zip(voltages, spikes)):
                    if s:
                        self.assertEqual(v, p.v_reset)
                    elif v >= p.v_th:
                        self.fail(f"I={current}: v={v} at step {n} reached v_th without a spike")

    def test_subthreshold_isi_is_infinite(self):
        self.assertEqual(isi_closed_form(LifParams(), 0.5), math.inf)

    def test_doubling_current_never_fires_less(self):
        p = LifParams()
        for current in (0.5, 1.0, 1.2, 2.0, 3.0, 5.0):
            self.assertGreaterEqual(sum(lif_run(p, [2 * current] * 500)), sum(lif_run(p, [current] * 500)))

    def test_rate_monotone_in_current(self):
        p = LifParams()
        rates = [firing_rate(p, 0.5 + 0.5 * k, 1000) for k in range(12)]
        self.assertTrue(all(a <= b for a, b in zip(rates, rates[1:])))
        self.assertEqual(rates[0], 0.0)
        self.assertGreater(rates[-1], 0.0)

    def test_isi_converges_with_smaller_step(self):
        closed = isi_closed_form(FAST, 2.0)
        errors = []
        for dt in (0.0001, 0.00001):
            p = LifParams(tau=0.01, dt=dt)
            times = spike_times(lif_run(p, [2.0] * int(0.03 / dt)))
            errors.append(abs((times[1] - times[0]) * dt - closed))
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[1], 0.00001 * 2)

    def test_firing_rate_needs_steps(self):
        with self.assertRaises(NeuronError):
            firing_rate(LifParams(), 1.0, 0)


class CodingTests(SimpleTestCase):

    def test_decode(self):
        self.assertEqual(rate_decode([True] * 10, 3)[2:], [1.0] * 8)
        self.assertEqual(rate_decode([True] * 3, 3), [1 / 3, 2 / 3, 1.0])
        self.assertEqual(rate_decode([False] * 10, 4), [0.0] * 10)
        self.assertEqual(rate_decode([True, False] * 5, 2)[1:], [0.5] * 9)
        self.assertEqual(rate_decode([], 2), [])
        with self.assertRaises(NeuronError):
            rate_decode([True], 0)

    def test_encode(self):
        zero = gen_step(5, 0.0, Q15)
        self.assertEqual(rate_encode(zero, 1.0), [0.0] * 5)
        negative = Trace.of([quantize(-0.5, Q15), quantize(0.25, Q15)], Q15)
        self.assertEqual(rate_encode(negative, 2.0), [0.0, 0.5])
        self.assertEqual(rate_encode(gen_step(4, 0.5, Q15), 2.0), [1.0] * 4)
        with self.assertRaises(NeuronError):
            rate_encode(zero, 0.0)

    def test_output_stage_rate_grows_with_amplitude(self):
        p = LifParams()
        low = spiking_output_stage(gen_step(400, 0.3, Q15), p, 4.0, 50)
        high = spiking_output_stage(gen_step(400, 0.9, Q15), p, 4.0, 50)
        self.assertEqual(len(low), 400)
        self.assertGreater(sum(high[50:]), sum(low[50:]))

    def test_spike_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'spikes.csv'
            write_spike_csv(path, [False, True], [0.25, 0.0])
            with path.open() as f:
                rows = list(csv.reader(f))
            self.assertEqual(rows, [['n', 'spike', 'v'], ['0', '0', '0.25'], ['1', '1', '0']])
            write_spike_csv(path, [True])
            self.assertEqual(path.read_text(), "n,spike\n0,1\n")
            with self.assertRaises(NeuronError):
                write_spike_csv(path, [True], [0.1, 0.2])
