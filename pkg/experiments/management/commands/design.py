from django.core.management.base import BaseCommand, CommandError

from analog_design.sallen_key import (
    AnalogDesignError, quality_factor, sallen_key_design, sallen_key_transfer, stability_check, tf_poles,
)
from experiments.config import ExperimentError
from experiments.report_utils import write_csv
from signals.traces import format_value


class Command(BaseCommand):
    help = "Analog filter design: component values and s-domain transfer function."

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=['sallen-key'])
        parser.add_argument('--alpha', type=float, default=7.0)
        parser.add_argument('--beta', type=float, default=6.0)
        parser.add_argument('--cap', type=float, default=15e-9, help='capacitance C in farads')
        parser.add_argument('--ra', type=float, default=1e3, help='ground-leg resistor R_A in ohms')
        parser.add_argument('--r', type=float, default=None, help='pin R in ohms instead of deriving it')
        parser.add_argument('--out', help='write quantity,value,unit CSV')

    def handle(self, *args, **options):
        try:
            design = sallen_key_design(
                options['alpha'], options['beta'], options['cap'], options['ra'], r_override=options['r']
            )
            tf = sallen_key_transfer(design)
            rows = design.as_rows() + [
                ('b0', tf.b0, '1/s^2'),
                ('a1', tf.a1, '1/s'),
                ('a0', tf.a0, '1/s^2'),
            ]
            stable = stability_check(tf)
            poles = tf_poles(tf)
            q = quality_factor(tf) if tf.a1 != 0 else None
            if options['out']:
                write_csv(options['out'], ['quantity', 'value', 'unit'],
                          [(name, format_value(value), unit) for name, value, unit in rows])
        except (AnalogDesignError, ExperimentError) as exc:
            raise CommandError(str(exc)) from exc

        width = max(len(name) for name, _, _ in rows)
        for name, value, unit in rows:
            self.stdout.write(f"{name.ljust(width)}  {format_value(value)} {unit}".rstrip())
        self.stdout.write(f"poles: {poles[0]:.6g}, {poles[1]:.6g}")
        self.stdout.write(f"Q: {format_value(q)}" if q is not None else "Q: unbounded")
        self.stdout.write(f"stable: {'yes' if stable else 'no'}")
