"""
CSV traces and the text report of an experiment run.
"""

import csv
from pathlib import Path

from fixedpoint.qformat import dequantize
from signals.traces import format_value
from .config import ExperimentError
from .services import GOLDEN_MODEL, ExperimentResult


def csv_header(r: ExperimentResult) -> list[str]:
    names = ['x'] + [f"y_{m}" for m in r.models]
    return ['n'] + names + [f"{name}_raw" for name in names]


def csv_rows(r: ExperimentResult):
    traces = [r.input] + [r.outputs[m] for m in r.models]
    for n in range(len(r.input)):
        samples = [t[n] for t in traces]
        yield [n] + [format_value(dequantize(s)) for s in samples] + [s.raw for s in samples]


def emit_csv(r: ExperimentResult, path) -> None:
    write_csv(path, csv_header(r), csv_rows(r))


def emit_report(r: ExperimentResult) -> str:
    cfg = r.config
    rows = [('model', f"MSE vs {GOLDEN_MODEL} golden")]
    if r.spike_rates:
        rows[0] += ('mean spike rate',)
    for m in r.models:
        row = (m, f"{r.mse_table[m]:.6f}")
        if r.spike_rates:
            row += (f"{r.spike_rates[m]:.6f}",)
        rows.append(row)

    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    table = []
    for i, row in enumerate(rows):
        table.append('  '.join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            table.append('  '.join('-' * w for w in widths))

    lines = [
        'neurodsp experiment report',
        f"seed: {cfg.seed} (train phase {r.train_seed}, test phase {r.test_seed})",
        f"test steps: {cfg.steps}  train steps: {cfg.train_steps}  format: {cfg.fmt}",
        f"digest: {r.digest()}",
        '',
        *table,
        '',
        'config:',
    ]
    key_width = max(len(key) for key in cfg.as_dict())
    for key, value in cfg.as_dict().items():
        if isinstance(value, list):
            value = ','.join(value)
        lines.append(f"  {key.ljust(key_width)} = {value}")
    return '\n'.join(lines) + '\n'


def write_rows(f, header, rows) -> None:
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    try:
        with path.open('w', newline='', encoding='utf-8') as f:
            write_rows(f, header, rows)
    except OSError as exc:
        raise ExperimentError(f"cannot write {path}: {exc}") from exc
