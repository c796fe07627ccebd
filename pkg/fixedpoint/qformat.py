"""
Signed Q-format fixed-point arithmetic
======================================

Bit-exact two's-complement arithmetic used by every filter datapath.

Convention:
    qW.F → W total bits (sign included), F fractional bits.
    q16.15 is Q15: range [-1, 1 - 2^-15], 1 LSB = 2^-15.

Rounding is round-half-to-even everywhere (quantize and post-multiply
rescale). Overflow always saturates, it never wraps.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from neurodsp.exceptions import NeuroDspError


class FixedPointError(NeuroDspError):
    """Invalid format, format mismatch or NaN input"""
    pass


_FORMAT_RE = re.compile(r'^[qQ](\d+)\.(\d+)$')


@dataclass(frozen=True, slots=True)
class QFormat:
    width: int = 24
    frac: int = 16

    def __post_init__(self):
        if not 2 <= self.width <= 64:
            raise FixedPointError(f"width must be in 2..64, got {self.width}")
        if not 0 <= self.frac <= self.width - 1:
            raise FixedPointError(
                f"frac must be in 0..{self.width - 1} for width {self.width}, got {self.frac}"
            )

    @classmethod
    def parse(cls, text: str) -> QFormat:
        """Parse ``"qW.F"`` (e.g. ``"q16.15"``)."""
        match = _FORMAT_RE.match(text.strip())
        if not match:
            raise FixedPointError(f"bad Q-format {text!r}, expected qW.F")
        return cls(int(match.group(1)), int(match.group(2)))

    @property
    def raw_min(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.width - 1)) - 1

    @property
    def resolution(self) -> float:
        return math.ldexp(1.0, -self.frac)

    @property
    def min_value(self) -> float:
        return math.ldexp(self.raw_min, -self.frac)

    @property
    def max_value(self) -> float:
        return math.ldexp(self.raw_max, -self.frac)

    def __str__(self) -> str:
        return f"q{self.width}.{self.frac}"


Q15 = QFormat(16, 15)
DATA_FORMAT = QFormat(24, 16)


def coefficient_format(fmt: QFormat) -> QFormat:
    """Same width as ``fmt`` with two guard bits, i.e. range [-4, 4)."""
    return QFormat(fmt.width, max(fmt.frac - 2, 0))


def activation_format(fmt: QFormat) -> QFormat:
    """Same width as ``fmt`` with three guard bits, i.e. range [-8, 8)."""
    return QFormat(fmt.width, max(fmt.frac - 3, 0))


@dataclass(frozen=True, slots=True)
class QSample:
    raw: int
    fmt: QFormat

    def __post_init__(self):
        if not self.fmt.raw_min <= self.raw <= self.fmt.raw_max:
            raise FixedPointError(f"raw {self.raw} does not fit in {self.fmt}")

    @property
    def value(self) -> float:
        return dequantize(self)

    def __repr__(self) -> str:
        return f"QSample({self.raw}, {self.fmt})"


def saturate(raw: int, fmt: QFormat) -> int:
    if raw > fmt.raw_max:
        return fmt.raw_max
    if raw < fmt.raw_min:
        return fmt.raw_min
    return raw


def round_div(num: int, den: int) -> int:
    """num / den rounded half-to-even (den > 0)."""
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def round_shift(acc: int, shift: int) -> int:
    """acc · 2^-shift rounded half-to-even; negative shift scales up exactly."""
    if shift <= 0:
        return acc << -shift
    q = acc >> shift
    r = acc - (q << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return q


def quantize(value: float, fmt: QFormat) -> QSample:
    if math.isnan(value):
        raise FixedPointError("cannot quantize NaN")
    scaled = math.ldexp(value, fmt.frac)
    if math.isinf(scaled):
        return QSample(fmt.raw_max if scaled > 0 else fmt.raw_min, fmt)
    # round() on a float is exact round-half-to-even
    return QSample(saturate(round(scaled), fmt), fmt)


def dequantize(s: QSample) -> float:
    return math.ldexp(s.raw, -s.fmt.frac)


def _check_same(a: QSample, b: QSample) -> None:
    if a.fmt != b.fmt:
        raise FixedPointError(f"format mismatch: {a.fmt} vs {b.fmt}")


def sat_add(a: QSample, b: QSample) -> QSample:
    _check_same(a, b)
    return QSample(saturate(a.raw + b.raw, a.fmt), a.fmt)


def sat_sub(a: QSample, b: QSample) -> QSample:
    _check_same(a, b)
    return QSample(saturate(a.raw - b.raw, a.fmt), a.fmt)


def sat_mul(a: QSample, b: QSample) -> QSample:
    _check_same(a, b)
    return QSample(saturate(round_shift(a.raw * b.raw, a.fmt.frac), a.fmt), a.fmt)


def dot(coeffs: Sequence[QSample], samples: Sequence[QSample], out_fmt: QFormat) -> QSample:
    """
    Multiply-accumulate with one final rounding.

    Products are summed exactly at scale 2^-(coeff.frac + sample.frac) and
    rescaled once into ``out_fmt``. All coefficients must share one format
    and all samples another.
    """
    if len(coeffs) != len(samples):
        raise FixedPointError(f"length mismatch: {len(coeffs)} coefficients vs {len(samples)} samples")
    if not coeffs:
        return QSample(0, out_fmt)
    c_fmt = coeffs[0].fmt
    s_fmt = samples[0].fmt
    acc = 0
    for c, s in zip(coeffs, samples):
        if c.fmt != c_fmt or s.fmt != s_fmt:
            raise FixedPointError("mixed formats inside one MAC")
        acc += c.raw * s.raw
    shift = c_fmt.frac + s_fmt.frac - out_fmt.frac
    return QSample(saturate(round_shift(acc, shift), out_fmt), out_fmt)