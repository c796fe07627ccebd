from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from neurodsp.exceptions import NeuroDspError
from experiments.config import CONFIG_KEYS, load_config
from experiments.models import ExperimentRun
from experiments.report_utils import emit_csv, emit_report
from experiments.services import run_experiment

FLAG_KEYS = ('allow_untrained', 'spike_stage')


class Command(BaseCommand):
    help = "Run the classical and neuromorphic filters on a shared stimulus and report MSE against the FIR golden output."

    def add_arguments(self, parser):
        for key, (section, _, _) in CONFIG_KEYS.items():
            flag = '--' + key.replace('_', '-')
            if key in FLAG_KEYS:
                parser.add_argument(flag, action='store_true', default=None, help=f"[{section}] {key}")
            else:
                parser.add_argument(flag, default=None, help=f"[{section}] {key}")
        parser.add_argument('--config', help='experiment config file (INI sections signal, filters, network, experiment)')
        parser.add_argument('--out', help='write test-phase traces as CSV')
        parser.add_argument('--report', help='write the report to a file instead of stdout')
        parser.add_argument('--save', action='store_true', help='store the run in the database')

    def handle(self, *args, **options):
        overrides = {key: options.get(key) for key in CONFIG_KEYS}
        try:
            cfg = load_config(options['config'], overrides)
            result = run_experiment(cfg)
            report = emit_report(result)
            if options['out']:
                emit_csv(result, options['out'])
        except NeuroDspError as exc:
            raise CommandError(str(exc)) from exc

        if options['report']:
            try:
                Path(options['report']).write_text(report, encoding='utf-8')
            except OSError as exc:
                raise CommandError(f"cannot write report to {options['report']}: {exc}") from exc
        else:
            self.stdout.write(report, ending='')

        if options['save']:
            run = ExperimentRun.record(result, report)
            self.stdout.write(self.style.SUCCESS(f"saved run {run.pk}"))
