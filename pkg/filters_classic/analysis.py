"""
Frequency-response and gain analysis on dequantized coefficients.

    H(e^{jω}) = Σ h[k]·e^{−jωk},   0 ≤ ω ≤ π
    DC gain   = Σ h[k]
    Gain_dB   = 20·log10(|H(ω)|)
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import signal as sps

from fixedpoint.qformat import QSample, dequantize
from .fir import FilterError
from .iir import BiquadCoeffs


def _floats(coeffs: Sequence[QSample | float]) -> np.ndarray:
    return np.array([dequantize(c) if isinstance(c, QSample) else float(c) for c in coeffs], dtype=np.float64)


def _check_omega(omega: float) -> None:
    if not 0.0 <= omega <= math.pi:
        raise FilterError(f"omega must lie in [0, pi], got {omega}")


def fir_freq_response(coeffs: Sequence[QSample | float], omega: float) -> complex:
    _check_omega(omega)
    h = _floats(coeffs)
    k = np.arange(len(h))
    return complex(np.sum(h * np.exp(-1j * omega * k)))


def fir_dc_gain(coeffs: Sequence[QSample | float]) -> float:
    return math.fsum(_floats(coeffs))


def gain_db(magnitude: float) -> float:
    if not magnitude > 0:
        raise FilterError(f"gain in dB needs a positive magnitude, got {magnitude}")
    return 20.0 * math.log10(magnitude)


def iir_freq_response(b: Sequence[QSample | float], a: Sequence[QSample | float], omega: float) -> complex:
    """B(e^{jω}) / A(e^{jω}) with ``a`` holding a_1..a_N (a_0 = 1)."""
    _check_omega(omega)
    num = fir_freq_response(b, omega)
    den = fir_freq_response([1.0, *_floats(a)], omega)
    return num / den


def biquad_freq_response(coeffs: BiquadCoeffs, omega: float) -> complex:
    c = coeffs.as_floats()
    b = [c['g'], c['g'] * c['beta1'], c['g'] * c['beta2']]
    return iir_freq_response(b, [c['a1'], c['a2']], omega)


def freq_sweep(b: Sequence[QSample | float], a: Sequence[QSample | float] = (), points: int = 512):
    """
    Sweep ``points`` frequencies over [0, π).

    Returns rows ``(k, omega, magnitude, gain_db)``; gain_db is None where the
    magnitude is exactly zero.
    """
    if points < 1:
        raise FilterError(f"points must be >= 1, got {points}")
    den = np.concatenate(([1.0], _floats(a)))
    w, h = sps.freqz(_floats(b), den, worN=points)
    rows = []
    for k, (omega, value) in enumerate(zip(w, h)):
        magnitude = float(abs(value))
        rows.append((k, float(omega), magnitude, gain_db(magnitude) if magnitude > 0 else None))
    return rows
