import math

from fixedpoint.qformat import dequantize
from .traces import SignalError, Trace


def squared_errors(a: Trace, b: Trace) -> list[float]:
    if len(a) != len(b):
        raise SignalError(f"length mismatch: {len(a)} vs {len(b)}")
    if a.fmt != b.fmt:
        raise SignalError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return [(dequantize(x) - dequantize(y)) ** 2 for x, y in zip(a, b)]


def mse(a: Trace, b: Trace) -> float:
    """Mean squared error between two equally long, equally formatted traces."""
    errors = squared_errors(a, b)
    if not errors:
        raise SignalError("mse of empty traces is undefined")
    return math.fsum(errors) / len(errors)
