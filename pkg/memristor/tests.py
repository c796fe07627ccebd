import math
import random
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from fixedpoint.qformat import Q15
from .crossbar import (
    CrossbarMatrix, conductance_to_state, crossbar_mac, program_weights, reconstruct_weights,
    states_to_crossbar,
)
from .device import (
    MemristorError, MemristorParams, MemristorState, ThresholdFluxParams, conductance, iv_sweep,
    loop_area, memristor_step, threshold_flux_step, window,
)
from .matrix_io import dump_matrix, load_matrix, read_matrix, write_matrix


P = MemristorParams()


def _final_x(dt, periods=1, p=P):
    state = MemristorState(p.x0)
    for n in range(round(periods / (50 * dt))):
        state = memristor_step(state, math.sin(2 * math.pi * 50 * n * dt), dt, p)
    return state.x


class DeviceTests(SimpleTestCase):

    def test_params(self):
        self.assertEqual((P.r_on, P.r_off, P.k, P.x0), (100.0, 16000.0, 10000.0, 0.3))
        for kwargs in ({'r_on': 0}, {'r_on': 20000}, {'k': 0}, {'x0': 1.5}):
            with self.assertRaises(MemristorError):
                MemristorParams(**kwargs)
        with self.assertRaises(MemristorError):
            ThresholdFluxParams(1e-3, 0.0, 1.0)

    def test_conductance_examples(self):
        self.assertEqual(conductance(MemristorState(1.0), P), 0.01)
        self.assertEqual(conductance(MemristorState(0.0), P), 62.5e-6)
        self.assertAlmostEqual(conductance(MemristorState(0.3), P), 1 / 11230, places=15)

    def test_conductance_increases_with_state(self):
        gs = [conductance(MemristorState(k / 100), P) for k in range(101)]
        self.assertTrue(all(a < b for a, b in zip(gs, gs[1:])))

    def test_window(self):
        self.assertEqual(window(0.0), 0.0)
        self.assertEqual(window(1.0), 0.0)
        self.assertEqual(window(0.5), 1.0)

    def test_step_fixed_points(self):
        s = MemristorState(0.3)
        self.assertEqual(memristor_step(s, 0.0, 1e-5, P), s)
        for x in (0.0, 1.0):
            for v in (-5.0, 5.0):
                self.assertEqual(memristor_step(MemristorState(x), v, 1e-3, P).x, x)
        with self.assertRaises(MemristorError):
            memristor_step(s, 1.0, 0.0, P)

    def test_state_stays_confined(self):
        rng = random.Random(3)
        for k in (1e5, 1e8):
            state = MemristorState(0.5)
            p = MemristorParams(k=k)
            for _ in range(5 * 10 ** 5):
                state = memristor_step(state, rng.uniform(-10, 10), 1e-3, p)
                if not 0.0 <= state.x <= 1.0:
                    self.fail(f"k={k}: x = {state.x} left [0, 1]")

    def test_state_returns_after_whole_periods(self):
        coarse = _final_x(1e-5)
        fine = _final_x(1e-6)
        self.assertLessEqual(abs(coarse - fine), 1e-3)
        self.assertLessEqual(abs(coarse - P.x0), 1e-3)

    def test_first_order_refinement(self):
        # a fast device so the state moves visibly within one period
        p = MemristorParams(k=1e6)
        xs = [_final_x(dt, p=p, periods=0.25) for dt in (4e-5, 2e-5, 1e-5)]
        self.assertLess(abs(xs[2] - xs[1]), abs(xs[1] - xs[0]))
        self.assertLess(abs(xs[1] - xs[0]), 1e-2)


class ThresholdFluxTests(SimpleTestCase):

    p = ThresholdFluxParams(i0=1e-3, v0=0.25, v_th=1.0)

    def test_below_threshold_holds(self):
        for v in (-1.0, -0.3, 0.0, 0.7, 1.0):
            self.assertEqual(threshold_flux_step(0.42, v, 1e-3, self.p), 0.42)

    def test_just_above_threshold(self):
        rates = [threshold_flux_step(0.0, 1.0 + eps, 1.0, self.p) for eps in (1e-2, 1e-4, 1e-6)]
        self.assertTrue(all(r > 0 for r in rates))
        self.assertTrue(rates[0] > rates[1] > rates[2])
        self.assertLess(rates[2], 1e-6)

    def test_odd_symmetry(self):
        for v in (1.2, 2.0, 3.5):
            self.assertEqual(threshold_flux_step(0.0, -v, 1e-3, self.p), -threshold_flux_step(0.0, v, 1e-3, self.p))

    def test_bad_dt(self):
        with self.assertRaises(MemristorError):
            threshold_flux_step(0.0, 2.0, -1.0, self.p)


class IvSweepTests(SimpleTestCase):

    def test_pinched_at_origin(self):
        points = iv_sweep(P, 1.0, 50, 1e-5, 3)
        self.assertEqual(len(points), 6001)
        for point in points:
            if point.v == 0.0:
                self.assertEqual(point.i, 0.0)
        self.assertEqual(points[0].x, P.x0)

    def test_loop_has_area(self):
        points = iv_sweep(P, 1.0, 50, 1e-5, 1)
        self.assertGreater(loop_area(points), 0.0)

    def test_frozen_device_is_a_line(self):
        frozen = MemristorParams(k=1e-12)
        g0 = conductance(MemristorState(frozen.x0), frozen)
        points = iv_sweep(frozen, 1.0, 50, 1e-5, 1)
        for point in points:
            if abs(point.v) > 1e-3:
                self.assertAlmostEqual(point.i / point.v / g0, 1.0, delta=1e-9)
        self.assertLess(loop_area(points), 1e-15)

    def test_bad_drive(self):
        with self.assertRaises(MemristorError):
            iv_sweep(P, 0.0, 50, 1e-5, 1)
        with self.assertRaises(MemristorError):
            iv_sweep(P, 1.0, 50, 1e-5, 0)

    def test_shoelace_unit_square(self):
        from .device import IvPoint
        square = [IvPoint(0, v, i, 0) for v, i in ((0, 0), (1, 0), (1, 1), (0, 1))]
        self.assertEqual(loop_area(square), 1.0)
        self.assertEqual(loop_area(square[:2]), 0.0)


class CrossbarTests(SimpleTestCase):

    def test_mac_example(self):
        m = CrossbarMatrix(np.array([[0.001, 0.002], [0.003, 0.004]]), 1e-4, 0.01)
        i = crossbar_mac([1.0, 2.0], m)
        self.assertAlmostEqual(i[0], 0.007, places=15)
        self.assertAlmostEqual(i[1], 0.010, places=15)
        self.assertEqual(list(crossbar_mac([0.0, 0.0], m)), [0.0, 0.0])

    def test_mac_matches_dot_oracle_and_is_linear(self):
        rng = np.random.default_rng(8)
        m = CrossbarMatrix(rng.uniform(P.g_min, P.g_max, (8, 8)), P.g_min, P.g_max)
        v1, v2 = rng.uniform(-1, 1, 8), rng.uniform(-1, 1, 8)
        i = crossbar_mac(v1, m)
        for j in range(8):
            expected = math.fsum(v1[r] * m.g[r][j] for r in range(8))
            self.assertLessEqual(abs(i[j] - expected), 1e-12 * max(abs(expected), 1e-12))
        combined = crossbar_mac(2.5 * v1 + v2, m)
        separate = 2.5 * crossbar_mac(v1, m) + crossbar_mac(v2, m)
        np.testing.assert_allclose(combined, separate, rtol=1e-12, atol=1e-15)

    def test_mac_dimension_mismatch(self):
        m = CrossbarMatrix(np.full((3, 2), 1e-3), 1e-4, 1e-2)
        with self.assertRaises(MemristorError):
            crossbar_mac([1.0, 2.0], m)

    def test_conductance_range_enforced(self):
        with self.assertRaises(MemristorError):
            CrossbarMatrix(np.array([[0.5]]), 1e-4, 1e-2)
        with self.assertRaises(MemristorError):
            CrossbarMatrix(np.array([[1e-3]]), 1e-2, 1e-4)
        with self.assertRaises(MemristorError):
            CrossbarMatrix(np.array([[1e-3, np.nan]]), 1e-4, 1e-2)

    def test_program_examples(self):
        pos, neg = program_weights([[0.0, 1.0, -1.0]], P.g_min, P.g_max)
        self.assertEqual(list(pos.g[0]), [P.g_min, P.g_max, P.g_min])
        self.assertEqual(list(neg.g[0]), [P.g_min, P.g_min, P.g_max])
        self.assertEqual(list(reconstruct_weights(pos, neg)[0]), [0.0, 1.0, -1.0])

    def test_program_round_trip(self):
        w = np.linspace(-1.0, 1.0, 1001).reshape(7, 143)
        pos, neg = program_weights(w, P.g_min, P.g_max)
        err = np.abs(reconstruct_weights(pos, neg) - w)
        self.assertLessEqual(err.max(), 1 / 255)

    def test_program_rejects_overrange(self):
        with self.assertRaises(MemristorError):
            program_weights([[1.01]], P.g_min, P.g_max)
        with self.assertRaises(MemristorError):
            program_weights([[0.5]], P.g_min, P.g_max, levels=1)

    def test_state_mapping(self):
        xs = [[0.0, 0.3, 1.0]]
        m = states_to_crossbar(xs, P)
        self.assertEqual(m.g[0][0], P.g_min)
        self.assertEqual(m.g[0][2], P.g_max)
        np.testing.assert_allclose(conductance_to_state(m.g, P), xs, atol=1e-12)
        with self.assertRaises(MemristorError):
            conductance_to_state([1.0], P)


class MatrixIoTests(SimpleTestCase):

    def test_raw_snapshot(self):
        text = dump_matrix([[1, -2, 3], [4, 5, -32768]], Q15)
        self.assertTrue(text.startswith("format q16.15 dims 2×3\n1\n-2\n"))
        fmt, rows = load_matrix(text)
        self.assertEqual(fmt, Q15)
        self.assertEqual(rows, [[1, -2, 3], [4, 5, -32768]])

    def test_real_snapshot_on_disk(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'g.txt'
            write_matrix(path, np.array([[6.25e-05, 0.01]]))
            fmt, rows = read_matrix(path)
            self.assertIsNone(fmt)
            self.assertEqual(rows, [[6.25e-05, 0.01]])

    def test_bad_snapshots(self):
        for text in ("", "format q16.15 dims 1×2\n5\n", "fmt q16.15\n1\n", "format q9.9 dims 1×1\n1\n",
                     "format q16.15 dims 1×1\nabc\n"):
            with self.assertRaises(MemristorError):
                load_matrix(text)
