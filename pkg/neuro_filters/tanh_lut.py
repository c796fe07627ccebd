"""
Fixed-point tanh by table lookup with linear interpolation.

The table samples tanh on the symmetric grid x_i = −R + 2R·i/(N − 1),
i = 0..N−1 (N = 1024, R = 4 by default). Inputs arrive in the activation
format, outputs leave in the data format. Lookups work on |x| and restore the
sign afterwards, so the map is exactly odd. Beyond ±R the output saturates to
±(1 − 1 LSB).
"""

from __future__ import annotations

import math
from fractions import Fraction

from fixedpoint.qformat import QFormat, QSample, activation_format, quantize, round_div
from neurodsp.exceptions import NeuroDspError


class NeuroFilterError(NeuroDspError):
    """Network misuse: wrong mode, format mismatch or a bad weight snapshot"""
    pass


class TanhLut:

    def __init__(self, fmt: QFormat, size: int = 1024, x_range: float = 4.0):
        if size < 2:
            raise NeuroFilterError(f"LUT size must be >= 2, got {size}")
        if not x_range > 0:
            raise NeuroFilterError(f"LUT range must be positive, got {x_range}")
        self.out_fmt = fmt
        self.in_fmt = activation_format(fmt)
        self.size = size
        self.x_range = Fraction(x_range)
        if self.x_range > Fraction(self.in_fmt.raw_max, 1 << self.in_fmt.frac):
            raise NeuroFilterError(f"LUT range ±{x_range} does not fit {self.in_fmt}")
        half = [quantize(math.tanh(-x_range + 2 * x_range * i / (size - 1)), fmt) for i in range(size // 2)]
        mirrored = [QSample(-s.raw, fmt) for s in reversed(half)]
        middle = [QSample(0, fmt)] if size % 2 else []
        self.entries: tuple[QSample, ...] = tuple(half + middle + mirrored)
        # grid position of an input raw value r: (r + R·2^f)·(N − 1) / (2R·2^f)
        scale = 1 << self.in_fmt.frac
        self._offset = self.x_range * scale
        self._den = 2 * self._offset
        self._saturated = (1 << fmt.frac) - 1

    def _lookup_abs(self, raw: int) -> int:
        if raw > self._offset:
            return self._saturated
        pos = (raw + self._offset) * (self.size - 1) / self._den
        i = math.floor(pos)
        if i >= self.size - 1:
            return self.entries[-1].raw
        frac = pos - i
        lo, hi = self.entries[i].raw, self.entries[i + 1].raw
        return lo + round_div((hi - lo) * frac.numerator, frac.denominator)

    def __call__(self, x: QSample) -> QSample:
        if x.fmt != self.in_fmt:
            raise NeuroFilterError(f"tanh input is {x.fmt}, LUT expects {self.in_fmt}")
        y = self._lookup_abs(abs(x.raw))
        return QSample(-y if x.raw < 0 else y, self.out_fmt)

    def __len__(self) -> int:
        return self.size


def tanh_lut(x: QSample, lut: TanhLut) -> QSample:
    return lut(x)
