"""
Rate coding between sample traces and spike trains.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from fixedpoint.qformat import dequantize
from signals.traces import Trace, format_value
from .lif import LifParams, NeuronError, lif_run


def rate_encode(x: Trace, i_scale: float) -> list[float]:
    """Rectified amplitude-to-current map: i_n = i_scale · max(0, x_n)."""
    if not i_scale > 0:
        raise NeuronError(f"i_scale must be positive, got {i_scale}")
    return [i_scale * max(0.0, dequantize(s)) for s in x]


def rate_decode(spikes: Sequence[bool], window: int) -> list[float]:
    """
    Causal sliding-window spike rate in spikes per step.

    The first ``window - 1`` outputs see a zero-padded history.
    """
    if window < 1:
        raise NeuronError(f"window must be >= 1, got {window}")
    if not spikes:
        return []
    indicator = np.asarray(spikes, dtype=np.float64)
    counts = np.convolve(indicator, np.ones(window))[:len(indicator)]
    return [float(c) / window for c in counts]


def spiking_output_stage(y: Trace, p: LifParams, i_scale: float, window: int) -> list[float]:
    """Drive a LIF neuron with a filter output and read its rate back."""
    return rate_decode(lif_run(p, rate_encode(y, i_scale)), window)


def write_spike_csv(path, spikes: Sequence[bool], voltages: Sequence[float] | None = None) -> None:
    """``n,spike`` or, with voltages, ``n,spike,v``."""
    if voltages is not None and len(voltages) != len(spikes):
        raise NeuronError(f"{len(voltages)} voltages for {len(spikes)} spikes")
    with Path(path).open('w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['n', 'spike'] if voltages is None else ['n', 'spike', 'v'])
        for n, s in enumerate(spikes):
            row = [n, int(s)]
            if voltages is not None:
                row.append(format_value(voltages[n]))
            writer.writerow(row)
