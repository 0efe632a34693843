"""Summary statistics with a fixed quantile rule.

Quartiles use linear interpolation between order statistics (position
``q * (n - 1)`` in the sorted sample), i.e. numpy's default ``linear`` method.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class SummaryStats:
    median: float
    iqr: float
    mean: float
    stderr: float
    n: int
    q1: float
    q3: float

    def as_dict(self) -> dict:
        return asdict(self)


def quantile(values, q: float) -> float:
    return float(np.quantile(np.sort(np.asarray(values, dtype=float)), q, method="linear"))


def summarize(values: Iterable[float]) -> SummaryStats:
    x = np.sort(np.asarray(list(values), dtype=float))
    if x.size == 0:
        raise InvalidArgumentError("cannot summarize an empty sample")
    q1, med, q3 = (float(v) for v in np.quantile(x, [0.25, 0.5, 0.75], method="linear"))
    mean = float(x.mean())
    stderr = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return SummaryStats(med, q3 - q1, mean, stderr, int(x.size), q1, q3)
