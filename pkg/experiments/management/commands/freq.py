from django.core.management.base import BaseCommand, CommandError
from django.conf import settings

from filters_classic.analysis import freq_sweep
from filters_classic.coeff_utils import load_coefficients
from filters_classic.design import design_lowpass_biquad, design_lowpass_fir
from filters_classic.fir import FilterError
from filters_classic.iir import BiquadCoeffs, biquad_as_df2t
from fixedpoint.qformat import QFormat, coefficient_format
from experiments.report_utils import write_csv, write_rows
from neurodsp.exceptions import NeuroDspError
from signals.traces import format_value

HEADER = ['k', 'omega', 'magnitude', 'gain_db']


def _iir_from_file(path, fmt: QFormat) -> BiquadCoeffs:
    values = load_coefficients(path, coefficient_format(fmt))
    if len(values) != 5:
        raise FilterError(f"{path}: a biquad file holds g, beta1, beta2, a1, a2 (5 values), got {len(values)}")
    g, beta1, beta2, a1, a2 = values
    return BiquadCoeffs(g=g, beta1=beta1, beta2=beta2, a1=a1, a2=a2)


class Command(BaseCommand):
    help = "Frequency response of the quantized FIR or biquad, as k,omega,magnitude,gain_db CSV."

    def add_arguments(self, parser):
        conf = settings.NEURODSP
        parser.add_argument('kind', choices=['fir', 'iir'])
        parser.add_argument('--coeffs', help='coefficient file (FIR taps, or g beta1 beta2 a1 a2 for iir)')
        parser.add_argument('--taps', type=int, default=conf['FIR_TAPS'])
        parser.add_argument('--cutoff', type=float, default=None, help='normalized cutoff (0, 0.5)')
        parser.add_argument('--q', type=float, default=conf['IIR_Q'])
        parser.add_argument('--format', default=conf['FORMAT'])
        parser.add_argument('--points', type=int, default=512)
        parser.add_argument('--out', help='CSV destination (stdout if omitted)')

    def handle(self, *args, **options):
        conf = settings.NEURODSP
        try:
            fmt = QFormat.parse(options['format'])
            if options['kind'] == 'fir':
                if options['coeffs']:
                    b = load_coefficients(options['coeffs'], fmt)
                else:
                    cutoff = conf['FIR_CUTOFF'] if options['cutoff'] is None else options['cutoff']
                    b = design_lowpass_fir(options['taps'], cutoff, fmt)
                a = []
            else:
                if options['coeffs']:
                    coeffs = _iir_from_file(options['coeffs'], fmt)
                else:
                    cutoff = conf['IIR_CUTOFF'] if options['cutoff'] is None else options['cutoff']
                    coeffs = design_lowpass_biquad(cutoff, options['q'], fmt)
                b, a = biquad_as_df2t(coeffs)
            rows = [
                (k, format_value(omega), format_value(magnitude), '' if db is None else format_value(db))
                for k, omega, magnitude, db in freq_sweep(b, a, options['points'])
            ]
            if options['out']:
                write_csv(options['out'], HEADER, rows)
        except NeuroDspError as exc:
            raise CommandError(str(exc)) from exc

        if options['out']:
            self.stdout.write(f"{len(rows)} points written to {options['out']}")
        else:
            write_rows(self.stdout, HEADER, rows)
