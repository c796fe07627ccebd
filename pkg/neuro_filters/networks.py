"""
Neuromorphic filter networks
============================

NeuroFir   single hidden layer over the FIR delay line
           h_i = tanh(Σ_j W_hidden[i][j]·x[n−j]),  y = Σ_i w_out[i]·h_i
ElmanNet   recurrent hidden state
           h'_i = tanh(w_in[i]·x + Σ_j W_rec[i][j]·h_j),  y = Σ_i w_out[i]·h'_i

Online LMS adapts the output layer (and, for the Elman net, the input
weights through a one-step gradient):

    e      = d − y
    w_out += μ·e·h
    w_in  += μ·e·w_out·(1 − h²)·x          (Elman, w_out before this step)

Every update product is formed exactly and rounded once. Weights live in
registers by default; in crossbar mode the forward pass uses the output
weights as read back from a differential memristor pair.
"""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np
from django.conf import settings

from fixedpoint.qformat import (
    QFormat, QSample, activation_format, dot, quantize, round_shift, sat_sub, saturate,
)
from memristor.crossbar import DEFAULT_LEVELS, program_weights, reconstruct_weights
from memristor.device import MemristorParams
from .tanh_lut import NeuroFilterError, TanhLut
from .weights import init_weights

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    TRAIN = 'train'
    INFER = 'infer'


class WeightStorage(str, Enum):
    REGISTER = 'register'
    CROSSBAR = 'crossbar'


class _Network:

    def __init__(self, fmt: QFormat, n_hidden: int, mu: float, lut: TanhLut | None,
                 storage: WeightStorage | str, levels: int, device: MemristorParams | None):
        if n_hidden < 1:
            raise NeuroFilterError(f"n_hidden must be >= 1, got {n_hidden}")
        if not mu > 0:
            raise NeuroFilterError(f"learning rate must be positive, got {mu}")
        self.fmt = fmt
        self.act_fmt = activation_format(fmt)
        self.n_hidden = n_hidden
        self.mu = quantize(mu, fmt)
        if self.mu.raw == 0:
            raise NeuroFilterError(f"learning rate {mu} rounds to zero in {fmt}")
        self.lut = lut or TanhLut(fmt)
        if self.lut.out_fmt != fmt:
            raise NeuroFilterError(f"tanh LUT produces {self.lut.out_fmt}, network runs in {fmt}")
        try:
            self.storage = WeightStorage(storage)
        except ValueError as exc:
            raise NeuroFilterError(f"unknown weight storage {storage!r}") from exc
        self.levels = levels
        self.device = device or MemristorParams()
        self.mode = Mode.TRAIN
        self.w_out = [QSample(0, fmt)] * n_hidden
        self._out_view: list[QSample] | None = None

    def set_mode(self, mode: Mode | str) -> None:
        try:
            self.mode = Mode(mode)
        except ValueError as exc:
            raise NeuroFilterError(f"unknown mode {mode!r}") from exc
        logger.debug("%s switched to %s mode", type(self).__name__, self.mode.value)

    def _require_train(self) -> None:
        if self.mode != Mode.TRAIN:
            raise NeuroFilterError("training step requested while the network is in infer mode")

    def _check_input(self, *samples: QSample) -> None:
        for s in samples:
            if s.fmt != self.fmt:
                raise NeuroFilterError(f"input is {s.fmt}, network expects {self.fmt}")

    def effective_out(self) -> list[QSample]:
        """Output weights as the forward MAC sees them."""
        if self.storage == WeightStorage.REGISTER:
            return self.w_out
        if self._out_view is None:
            values = np.array([w.value for w in self.w_out])
            full_scale = max(1.0, float(np.abs(values).max()))
            pos, neg = program_weights(values / full_scale, self.device.g_min, self.device.g_max, self.levels)
            restored = reconstruct_weights(pos, neg)[0] * full_scale
            self._out_view = [quantize(float(v), self.fmt) for v in restored]
        return self._out_view

    def _update(self, w: QSample, product: int, shift: int) -> QSample:
        return QSample(saturate(w.raw + round_shift(product, shift), self.fmt), self.fmt)

    def _lms_out(self, err: QSample, hidden: list[QSample]) -> None:
        f = self.fmt.frac
        self.w_out = [
            self._update(w, self.mu.raw * err.raw * h.raw, 2 * f)
            for w, h in zip(self.w_out, hidden)
        ]
        self._out_view = None

    def _activate(self, pre: QSample) -> QSample:
        return self.lut(pre)


class NeuroFir(_Network):
    """Feedforward approximator of an ``n_taps`` FIR."""

    def __init__(self, n_taps: int, fmt: QFormat, n_hidden: int = 8, mu: float = 2.0 ** -6, seed: int = 1,
                 lut: TanhLut | None = None, storage: WeightStorage | str = WeightStorage.REGISTER,
                 levels: int = DEFAULT_LEVELS, device: MemristorParams | None = None):
        super().__init__(fmt, n_hidden, mu, lut, storage, levels, device)
        if n_taps < 1:
            raise NeuroFilterError(f"n_taps must be >= 1, got {n_taps}")
        self.n_taps = n_taps
        self.seed = seed
        self.w_hidden = tuple(tuple(row) for row in init_weights(seed, (n_hidden, n_taps), fmt))
        self.reset()

    @classmethod
    def from_settings(cls, n_taps: int, fmt: QFormat, seed: int, **overrides) -> NeuroFir:
        conf = settings.NEURODSP
        kwargs = {
            'n_hidden': conf['NFIR_HIDDEN'],
            'mu': conf['MU'],
            'storage': conf['WEIGHT_STORAGE'],
            'levels': conf['CROSSBAR_LEVELS'],
            'lut': TanhLut(fmt, conf['TANH_LUT_SIZE'], conf['TANH_LUT_RANGE']),
        }
        kwargs.update(overrides)
        return cls(n_taps, fmt, seed=seed, **kwargs)

    def reset(self) -> None:
        zero = QSample(0, self.fmt)
        self.delay_line = [zero] * self.n_taps
        self.hidden = [zero] * self.n_hidden

    def forward(self, x: QSample) -> QSample:
        self._check_input(x)
        self.delay_line.insert(0, x)
        self.delay_line.pop()
        self.hidden = [self._activate(dot(row, self.delay_line, self.act_fmt)) for row in self.w_hidden]
        return dot(self.effective_out(), self.hidden, self.fmt)

    def train_step(self, x: QSample, desired: QSample) -> tuple[QSample, QSample]:
        self._require_train()
        self._check_input(x, desired)
        y = self.forward(x)
        err = sat_sub(desired, y)
        if err.raw:
            self._lms_out(err, self.hidden)
        return y, err

    def weight_matrices(self) -> dict[str, list[list[QSample]]]:
        return {'w_hidden': [list(row) for row in self.w_hidden], 'w_out': [list(self.w_out)]}


class ElmanNet(_Network):
    """Recurrent approximator of an IIR filter."""

    def __init__(self, fmt: QFormat, n_hidden: int = 4, mu: float = 2.0 ** -6, seed: int = 1,
                 lut: TanhLut | None = None, row_sum_limit: float = 0.9,
                 storage: WeightStorage | str = WeightStorage.REGISTER,
                 levels: int = DEFAULT_LEVELS, device: MemristorParams | None = None):
        super().__init__(fmt, n_hidden, mu, lut, storage, levels, device)
        self.seed = seed
        self.w_in = [row[0] for row in init_weights(seed, (n_hidden, 1), fmt)]
        self.w_rec = tuple(
            tuple(row) for row in init_weights(seed + 1, (n_hidden, n_hidden), fmt, row_sum_limit=row_sum_limit)
        )
        self.reset()

    @classmethod
    def from_settings(cls, fmt: QFormat, seed: int, **overrides) -> ElmanNet:
        conf = settings.NEURODSP
        kwargs = {
            'n_hidden': conf['NIIR_HIDDEN'],
            'mu': conf['MU'],
            'row_sum_limit': conf['ELMAN_ROW_SUM'],
            'storage': conf['WEIGHT_STORAGE'],
            'levels': conf['CROSSBAR_LEVELS'],
            'lut': TanhLut(fmt, conf['TANH_LUT_SIZE'], conf['TANH_LUT_RANGE']),
        }
        kwargs.update(overrides)
        return cls(fmt, seed=seed, **kwargs)

    def reset(self) -> None:
        self.h = [QSample(0, self.fmt)] * self.n_hidden

    def forward(self, x: QSample) -> QSample:
        self._check_input(x)
        inputs = [x, *self.h]
        self.h = [
            self._activate(dot([w_in, *w_rec], inputs, self.act_fmt))
            for w_in, w_rec in zip(self.w_in, self.w_rec)
        ]
        return dot(self.effective_out(), self.h, self.fmt)

    def train_step(self, x: QSample, desired: QSample) -> tuple[QSample, QSample]:
        self._require_train()
        self._check_input(x, desired)
        y = self.forward(x)
        err = sat_sub(desired, y)
        if err.raw:
            f = self.fmt.frac
            one = 1 << (2 * f)
            old_out = self.w_out
            self._lms_out(err, self.h)
            self.w_in = [
                self._update(w, self.mu.raw * err.raw * w_o.raw * (one - h.raw * h.raw) * x.raw, 5 * f)
                for w, w_o, h in zip(self.w_in, old_out, self.h)
            ]
        return y, err

    def weight_matrices(self) -> dict[str, list[list[QSample]]]:
        return {
            'w_in': [[w] for w in self.w_in],
            'w_rec': [list(row) for row in self.w_rec],
            'w_out': [list(self.w_out)],
        }


def nfir_forward(net: NeuroFir, x: QSample) -> QSample:
    return net.forward(x)


def nfir_train_step(net: NeuroFir, x: QSample, desired: QSample) -> tuple[QSample, QSample]:
    return net.train_step(x, desired)


def niir_forward(net: ElmanNet, x: QSample) -> QSample:
    return net.forward(x)


def niir_train_step(net: ElmanNet, x: QSample, desired: QSample) -> tuple[QSample, QSample]:
    return net.train_step(x, desired)
