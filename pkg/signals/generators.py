"""
Deterministic stimulus generation.

The test signal is a sinusoid plus bounded uniform noise drawn from a 31-bit
LCG, quantized into the configured Q-format:

    x[n] = A·sin(2π·f·n/f_s) + A_noise·(2·(rnd_n mod 1000)/1000 − 1)

Identical (config, seed) pairs always give bit-identical traces.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from fixedpoint.qformat import Q15, QFormat, quantize
from .traces import SignalError, Trace

logger = logging.getLogger(__name__)

LCG_MULTIPLIER = 1103515245
LCG_INCREMENT = 12345
LCG_MODULUS = 1 << 31


class Lcg31:
    """state' = (1103515245·state + 12345) mod 2^31; each draw returns the new state."""

    def __init__(self, seed: int):
        self.seed = seed
        self.state = seed % LCG_MODULUS

    def next(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) % LCG_MODULUS
        return self.state

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * (self.next() / LCG_MODULUS)


@dataclass(frozen=True)
class SignalConfig:
    amplitude: float = 0.6
    freq: float = 50.0
    sample_rate: float = 1000.0
    noise_amp: float = 0.05
    n_steps: int = 2000
    seed: int = 1
    fmt: QFormat = field(default=Q15)

    def validate(self) -> None:
        if self.sample_rate <= 0:
            raise SignalError(f"sample rate must be positive, got {self.sample_rate}")
        if not 0 < self.freq < self.sample_rate / 2:
            raise SignalError(
                f"frequency {self.freq} Hz must lie in (0, {self.sample_rate / 2}) Hz"
            )
        if self.amplitude < 0 or self.noise_amp < 0:
            raise SignalError("amplitude and noise amplitude must be non-negative")
        if self.amplitude + self.noise_amp > self.fmt.max_value:
            raise SignalError(
                f"A + A_noise = {self.amplitude + self.noise_amp} exceeds the "
                f"{self.fmt} maximum {self.fmt.max_value}"
            )
        if self.n_steps < 1:
            raise SignalError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.seed < 0:
            raise SignalError(f"seed must be unsigned, got {self.seed}")


def phase_seeds(seed: int) -> tuple[int, int]:
    """Independent PRNG streams for the train and test phases."""
    return seed, seed + 1


def noise_term(rnd: int, noise_amp: float) -> float:
    return noise_amp * (2 * (rnd % 1000) / 1000 - 1)


def gen_test_signal(cfg: SignalConfig) -> Trace:
    cfg.validate()
    rng = Lcg31(cfg.seed)
    omega = 2 * math.pi * cfg.freq / cfg.sample_rate
    samples = [
        quantize(cfg.amplitude * math.sin(omega * n) + noise_term(rng.next(), cfg.noise_amp), cfg.fmt)
        for n in range(cfg.n_steps)
    ]
    logger.debug("generated %d samples (seed=%d, %s)", cfg.n_steps, cfg.seed, cfg.fmt)
    return Trace.of(samples, cfg.fmt)


def gen_impulse(n_steps: int, amplitude: float, fmt: QFormat) -> Trace:
    if n_steps < 1:
        raise SignalError(f"n_steps must be >= 1, got {n_steps}")
    zero = quantize(0.0, fmt)
    return Trace.of([quantize(amplitude, fmt)] + [zero] * (n_steps - 1), fmt)


def gen_step(n_steps: int, amplitude: float, fmt: QFormat) -> Trace:
    if n_steps < 1:
        raise SignalError(f"n_steps must be >= 1, got {n_steps}")
    return Trace.of([quantize(amplitude, fmt)] * n_steps, fmt)
