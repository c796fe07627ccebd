"""
Fixed-point sample traces and their CSV form (``n,raw,value``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from fixedpoint.qformat import QFormat, QSample, dequantize
from neurodsp.exceptions import NeuroDspError


class SignalError(NeuroDspError):
    """Invalid stimulus configuration or incompatible traces"""
    pass


def format_value(value: float) -> str:
    """Decimal with 9 significant digits, the CSV convention of every exporter."""
    return f"{value:.9g}"


@dataclass(frozen=True)
class Trace:
    samples: tuple[QSample, ...]
    fmt: QFormat

    def __post_init__(self):
        for n, s in enumerate(self.samples):
            if s.fmt != self.fmt:
                raise SignalError(f"sample {n} is {s.fmt}, trace is {self.fmt}")

    @classmethod
    def of(cls, samples: Sequence[QSample], fmt: QFormat) -> Trace:
        return cls(tuple(samples), fmt)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[QSample]:
        return iter(self.samples)

    def __getitem__(self, n: int) -> QSample:
        return self.samples[n]

    def values(self) -> list[float]:
        return [dequantize(s) for s in self.samples]

    def raws(self) -> list[int]:
        return [s.raw for s in self.samples]

    def to_csv(self, path) -> None:
        path = Path(path)
        try:
            with path.open('w', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(['n', 'raw', 'value'])
                for n, s in enumerate(self.samples):
                    writer.writerow([n, s.raw, format_value(dequantize(s))])
        except OSError as exc:
            raise SignalError(f"cannot write trace to {path}: {exc}") from exc

    @classmethod
    def from_csv(cls, path, fmt: QFormat) -> Trace:
        path = Path(path)
        try:
            with path.open(newline='') as f:
                rows = list(csv.DictReader(f))
        except OSError as exc:
            raise SignalError(f"cannot read trace from {path}: {exc}") from exc
        try:
            return cls.of([QSample(int(row['raw']), fmt) for row in rows], fmt)
        except (KeyError, ValueError) as exc:
            raise SignalError(f"malformed trace file {path}: {exc}") from exc
