"""
Coefficient files: one decimal coefficient per line, ``#`` starts a comment.
"""

from pathlib import Path

from fixedpoint.qformat import QFormat, QSample, quantize
from .fir import FilterError


def parse_coefficients(text: str, fmt: QFormat) -> list[QSample]:
    coeffs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            coeffs.append(quantize(float(line), fmt))
        except ValueError as exc:
            raise FilterError(f"line {lineno}: not a coefficient: {line!r}") from exc
    if not coeffs:
        raise FilterError("coefficient file holds no coefficients")
    return coeffs


def load_coefficients(path, fmt: QFormat) -> list[QSample]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FilterError(f"cannot read coefficients from {path}: {exc}") from exc
    return parse_coefficients(text, fmt)
