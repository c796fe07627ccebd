from django.core.management.base import BaseCommand, CommandError

from experiments.report_utils import write_csv, write_rows
from memristor.device import MemristorParams, iv_sweep, loop_area
from neurodsp.exceptions import NeuroDspError
from signals.traces import format_value


class Command(BaseCommand):
    help = "Sinusoidal I-V sweep of a memristive device, as t,v,i,x CSV."

    def add_arguments(self, parser):
        parser.add_argument('device', choices=['memristor'])
        parser.add_argument('--ron', type=float, default=None)
        parser.add_argument('--roff', type=float, default=None)
        parser.add_argument('--k', type=float, default=None)
        parser.add_argument('--x0', type=float, default=None)
        parser.add_argument('--vamp', type=float, default=1.0)
        parser.add_argument('--vfreq', type=float, default=50.0)
        parser.add_argument('--dt', type=float, default=1e-5)
        parser.add_argument('--periods', type=int, default=3)
        parser.add_argument('--out', help='CSV destination (stdout if omitted)')

    def handle(self, *args, **options):
        try:
            base = MemristorParams.from_settings()
            params = MemristorParams(
                r_on=base.r_on if options['ron'] is None else options['ron'],
                r_off=base.r_off if options['roff'] is None else options['roff'],
                k=base.k if options['k'] is None else options['k'],
                x0=base.x0 if options['x0'] is None else options['x0'],
            )
            points = iv_sweep(params, options['vamp'], options['vfreq'], options['dt'], options['periods'])
            rows = [
                (format_value(p.t), format_value(p.v), format_value(p.i), format_value(p.x))
                for p in points
            ]
            if options['out']:
                write_csv(options['out'], ['t', 'v', 'i', 'x'], rows)
        except NeuroDspError as exc:
            raise CommandError(str(exc)) from exc

        if options['out']:
            self.stdout.write(
                f"{len(points)} points, loop area {format_value(loop_area(points))}, "
                f"final x {format_value(points[-1].x)}"
            )
        else:
            write_rows(self.stdout, ['t', 'v', 'i', 'x'], rows)
