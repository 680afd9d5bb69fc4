"""Nearest-rank percentiles, ECDF points and min/max/mean/p95 summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class NoDataError(ValueError):
    """Statistic requested over an empty sample set."""


def _values(values: Iterable[float]) -> list[float]:
    vals = [float(v) for v in values]
    if not vals:
        raise NoDataError("no samples collected")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("samples must be finite")
    return vals


def percentile(values: Iterable[float], p: float) -> float:
    """Nearest-rank percentile: the ``ceil(p/100 * n)``-th smallest value (1-based)."""
    if not 0 < p <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    vals = sorted(_values(values))
    rank = math.ceil(p * len(vals) / 100)
    return vals[max(rank, 1) - 1]


@dataclass(frozen=True)
class Summary:
    n: int
    min: float
    max: float
    mean: float
    p95: float


def summarize(values: Iterable[float]) -> Summary:
    vals = _values(values)
    # fsum keeps the mean exact enough that min <= mean <= max always holds
    mean = math.fsum(vals) / len(vals)
    lo, hi = min(vals), max(vals)
    return Summary(len(vals), lo, hi, min(max(mean, lo), hi), percentile(vals, 95))


def ecdf(values: Iterable[float]) -> list[tuple[float, float]]:
    """Step points ``(x, F(x))`` at each distinct value; the last fraction is 1.0."""
    vals = sorted(_values(values))
    n = len(vals)
    points = []
    for i, v in enumerate(vals, start=1):
        if i < n and vals[i] == v:
            continue
        points.append((v, i / n))
    return points


def histogram(values: Sequence[float], bins: int = 20) -> list[tuple[float, float, int]]:
    """Fixed-width ``(left, right, count)`` bins over ``[min, max]``."""
    vals = _values(values)
    counts, edges = np.histogram(vals, bins=bins, range=(min(vals), max(vals)))
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]


@dataclass
class SampleSet:
    label: str
    values: list[float]

    def summary(self) -> Summary | None:
        return summarize(self.values) if self.values else None
