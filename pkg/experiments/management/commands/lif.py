import math

from django.core.management.base import BaseCommand, CommandError

from neuro_core.coding import write_spike_csv
from neuro_core.lif import LifParams, NeuronError, isi_closed_form, lif_trace, spike_times
from signals.traces import format_value


class Command(BaseCommand):
    help = "Drive a leaky integrate-and-fire neuron with a constant current."

    def add_arguments(self, parser):
        parser.add_argument('--tau', type=float, default=None)
        parser.add_argument('--vth', type=float, default=None)
        parser.add_argument('--vreset', type=float, default=None)
        parser.add_argument('--vrest', type=float, default=None)
        parser.add_argument('--r', type=float, default=None)
        parser.add_argument('--tref', type=float, default=None)
        parser.add_argument('--dt', type=float, default=None)
        parser.add_argument('--current', type=float, default=2.0)
        parser.add_argument('--steps', type=int, default=1000)
        parser.add_argument('--out', help='write n,spike CSV')
        parser.add_argument('--voltages', action='store_true', help='add the membrane potential column v to --out')

    def handle(self, *args, **options):
        names = {
            'tau': 'tau', 'vth': 'v_th', 'vreset': 'v_reset', 'vrest': 'v_rest',
            'r': 'r_mem', 'tref': 't_ref', 'dt': 'dt',
        }
        overrides = {field: options[flag] for flag, field in names.items() if options[flag] is not None}
        try:
            if options['steps'] < 1:
                raise NeuronError(f"steps must be >= 1, got {options['steps']}")
            params = LifParams.from_settings(**overrides)
            voltages, spikes = lif_trace(params, [options['current']] * options['steps'])
            if options['out']:
                write_spike_csv(options['out'], spikes, voltages if options['voltages'] else None)
        except NeuronError as exc:
            raise CommandError(str(exc)) from exc
        except OSError as exc:
            raise CommandError(f"cannot write {options['out']}: {exc}") from exc

        times = spike_times(spikes)
        isi = isi_closed_form(params, options['current'])
        self.stdout.write(f"spikes: {len(times)} in {options['steps']} steps")
        self.stdout.write(f"rate: {format_value(len(times) / (options['steps'] * params.dt))} Hz")
        if len(times) > 1:
            mean_isi = (times[-1] - times[0]) / (len(times) - 1) * params.dt
            self.stdout.write(f"mean ISI: {format_value(mean_isi)} s")
        self.stdout.write(
            "closed-form ISI: " + ("none (subthreshold)" if math.isinf(isi) else f"{format_value(isi)} s")
        )
