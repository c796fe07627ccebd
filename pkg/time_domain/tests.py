import random
import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase

from .pulses import (
    TimeClock, TimeDomainError, TimePulse, time_adder, time_amplifier, time_register,
    write_cascade_csv, z_delay, z_delay_stages,
)


def us(value):
    return Fraction(value, 10 ** 6)


CLK = TimeClock(us(100))


class TimeRegisterTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(time_register(TimePulse(us(25)), CLK).width, us(75))
        self.assertEqual(time_register(TimePulse(0), CLK).width, us(100))
        self.assertEqual(time_register(TimePulse(us(100)), CLK).width, 0)

    def test_overrange(self):
        with self.assertRaises(TimeDomainError):
            time_register(TimePulse(us(101)), CLK)

    def test_involution_is_exact_for_floats(self):
        rng = random.Random(1)
        clk = TimeClock(1e-4)
        for _ in range(500):
            pulse = TimePulse(rng.uniform(0, 1e-4))
            self.assertEqual(time_register(time_register(pulse, clk), clk), pulse)

    def test_clock_and_pulse_validation(self):
        with self.assertRaises(TimeDomainError):
            TimeClock(0)
        with self.assertRaises(TimeDomainError):
            TimePulse(-1e-6)
        with self.assertRaises(TimeDomainError):
            TimePulse("wide")
        self.assertEqual(CLK.duty, Fraction(1, 4))


class AmplifierAndAdderTests(SimpleTestCase):

    def test_amplifier(self):
        self.assertEqual(time_amplifier(TimePulse(us(10)), CLK, 2).width, us(80))
        self.assertEqual(time_amplifier(TimePulse(us(50)), CLK, 2).width, 0)
        for w in (0, 13, 77, 100):
            self.assertEqual(time_amplifier(TimePulse(us(w)), CLK, 1), time_register(TimePulse(us(w)), CLK))

    def test_amplifier_errors(self):
        with self.assertRaises(TimeDomainError):
            time_amplifier(TimePulse(us(51)), CLK, 2)
        with self.assertRaises(TimeDomainError):
            time_amplifier(TimePulse(us(10)), CLK, 0)

    def test_adder(self):
        pulses = [TimePulse(us(w)) for w in (10, 20, 30)]
        self.assertEqual(time_adder(pulses, CLK).width, us(40))
        self.assertEqual(time_adder([], CLK).width, us(100))
        self.assertEqual(time_adder([TimePulse(us(100))], CLK).width, 0)
        for w in (0, 42, 100):
            self.assertEqual(time_adder([TimePulse(us(w))], CLK), time_register(TimePulse(us(w)), CLK))
        with self.assertRaises(TimeDomainError):
            time_adder([TimePulse(us(60)), TimePulse(us(50))], CLK)

    def test_random_amplifier_cases(self):
        rng = random.Random(8)
        clk = TimeClock(1e-4)
        t = Fraction(1e-4)
        fits = 0
        for _ in range(1000):
            w = Fraction(rng.uniform(0, 1e-4))
            a = Fraction(rng.uniform(0.01, 4.0))
            if a * w <= t:
                self.assertEqual(time_amplifier(TimePulse(w), clk, a).width, t - a * w)
                fits += 1
            else:
                with self.assertRaises(TimeDomainError):
                    time_amplifier(TimePulse(w), clk, a)
        self.assertGreater(fits, 100)
        self.assertLess(fits, 1000)

    def test_random_adder_cases(self):
        rng = random.Random(9)
        clk = TimeClock(1e-4)
        t = Fraction(1e-4)
        fits = 0
        for _ in range(1000):
            widths = [Fraction(rng.uniform(0, 5e-5)) for _ in range(rng.randint(1, 4))]
            pulses = [TimePulse(w) for w in widths]
            if sum(widths) <= t:
                self.assertEqual(time_adder(pulses, clk).width, t - sum(widths))
                fits += 1
            else:
                with self.assertRaises(TimeDomainError):
                    time_adder(pulses, clk)
        self.assertGreater(fits, 100)
        self.assertLess(fits, 1000)


class ZDelayTests(SimpleTestCase):

    def test_unit_delay(self):
        pulses = [TimePulse(us(w)) for w in (5, 17, 60)]
        self.assertEqual(z_delay(pulses, CLK), [TimePulse(0), pulses[0], pulses[1]])

    def test_random_unit_delay_is_exact(self):
        rng = random.Random(4)
        clk = TimeClock(1e-4)
        pulses = [TimePulse(rng.uniform(0, 1e-4)) for _ in range(50)]
        out = z_delay(pulses, clk)
        self.assertEqual(out[1:], pulses[:-1])

    def test_gain_two(self):
        pulses = [TimePulse(us(10)), TimePulse(us(20))]
        self.assertEqual([p.width for p in z_delay(pulses, CLK, a=2)], [0, us(20)])
        self.assertEqual([p.width for p in z_delay(pulses, CLK, a=2, flush=True)], [0, us(20), us(40)])

    def test_stage_records(self):
        records = z_delay_stages([TimePulse(us(10)), TimePulse(us(20))], CLK, a=2)
        self.assertEqual(records[1].stages, (us(60), us(40), us(80), us(20)))
        for r in records:
            self.assertTrue(all(0 <= w <= CLK.t_clk for w in r.stages))

    def test_stage_attributed_error(self):
        with self.assertRaisesMessage(TimeDomainError, "stage 1 AMP-TR(a)"):
            z_delay([TimePulse(us(10)), TimePulse(us(60))], CLK, a=2)

    def test_csv(self):
        records = z_delay_stages([TimePulse(us(10)), TimePulse(us(20))], CLK)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cascade.csv'
            write_cascade_csv(path, records)
            self.assertEqual(path.read_text(), "k,width_in,width_out\n0,1e-05,0\n1,2e-05,1e-05\n")
