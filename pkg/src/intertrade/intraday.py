"""Intraday duration pattern over the 240 one-minute bins of a trading day.

Per-day bin means are averaged across the days on which the bin actually
traded; dividing by the full day count would bias sparse bins downward.
Both counts are kept on the pattern.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PatternError
from .ingest import N_BINS, DurationSeries


@dataclass
class BinnedDurations:
    """Per (day, bin) counts and mean durations; ``means`` is ``nan`` where ``counts == 0``.

    Row ``i`` corresponds to ``days[i]``.
    """

    days: np.ndarray
    counts: np.ndarray
    means: np.ndarray

    def cell(self, day: int, j: int):
        """``(count, mean)`` for a cell, or ``None`` when no duration fell there."""
        i = np.searchsorted(self.days, day)
        if i >= len(self.days) or self.days[i] != day or self.counts[i, j] == 0:
            return None
        return int(self.counts[i, j]), float(self.means[i, j])


@dataclass
class IntradayPattern:
    means: np.ndarray
    day_count: int
    contributing_days: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return self.contributing_days > 0

    def to_csv(self) -> str:
        rows = ["bin,mean_tau,contributing_days"]
        for j, (m, c) in enumerate(zip(self.means.tolist(), self.contributing_days.tolist())):
            rows.append(f"{j},{'nan' if c == 0 else repr(m)},{c}")
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        d = self.defined
        return {
            "day_count": self.day_count,
            "defined_bins": int(d.sum()),
            "min_mean_tau": float(self.means[d].min()) if d.any() else None,
            "max_mean_tau": float(self.means[d].max()) if d.any() else None,
            "argmin_bin": int(np.flatnonzero(d)[np.argmin(self.means[d])]) if d.any() else None,
        }


def bin_mean_durations(series: DurationSeries) -> BinnedDurations:
    if len(series) == 0:
        raise ValueError("empty duration series")
    days, row = np.unique(series.day, return_inverse=True)
    key = row * N_BINS + series.bin
    size = len(days) * N_BINS
    counts = np.bincount(key, minlength=size).reshape(len(days), N_BINS)
    sums = np.bincount(key, weights=series.tau, minlength=size).reshape(len(days), N_BINS)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return BinnedDurations(days, counts, means)


def intraday_pattern(binned: BinnedDurations) -> IntradayPattern:
    """Average of the per-day bin means over the days on which each bin traded."""
    present = binned.counts > 0
    contributing = present.sum(axis=0)
    total = np.where(present, binned.means, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(contributing > 0, total / np.maximum(contributing, 1), np.nan)
    empty = np.flatnonzero(contributing == 0)
    if empty.size:
        warnings.warn(f"{empty.size} bins have no durations on any day (first: {empty[0]})",
                      RuntimeWarning, stacklevel=2)
    return IntradayPattern(means, len(binned.days), contributing)


def adjust(series: DurationSeries, pattern: IntradayPattern) -> DurationSeries:
    """Divide every duration by the pattern mean of its bin (dimensionless result)."""
    m = pattern.means[series.bin]
    bad = ~(np.isfinite(m) & (m > 0))
    if bad.any():
        raise PatternError(f"intraday pattern undefined in bin {int(series.bin[bad][0])}")
    return series.with_tau(series.tau / m, units="dimensionless", adjusted=True)


def restore(series: DurationSeries, pattern: IntradayPattern) -> DurationSeries:
    """Inverse of :func:`adjust`."""
    return series.with_tau(series.tau * pattern.means[series.bin], units="s", adjusted=False)


@dataclass
class PatternPolyFit:
    degree: int
    coefficients: np.ndarray  # ascending powers of the bin index
    rms: float
    domain: tuple[int, int] = (0, N_BINS - 1)

    def __call__(self, j):
        return np.polynomial.Polynomial(self.coefficients)(np.asarray(j, dtype=float))


def pattern_polyfit(pattern: IntradayPattern, degree: int = 4) -> PatternPolyFit:
    """Least-squares polynomial through the defined bins, for display only."""
    if not 1 <= degree <= 10:
        raise ValueError("degree must be between 1 and 10")
    j = np.flatnonzero(pattern.defined)
    if len(j) < degree + 1:
        raise PatternError(f"{len(j)} defined bins cannot determine a degree-{degree} polynomial")
    y = pattern.means[j]
    # fit on the scaled domain, then express in powers of the raw bin index
    poly = np.polynomial.Polynomial.fit(j, y, degree, domain=[0, N_BINS - 1])
    resid = y - poly(j)
    coef = poly.convert().coef
    coef = np.pad(coef, (0, degree + 1 - len(coef)))
    return PatternPolyFit(degree, coef, float(np.sqrt(np.mean(resid ** 2))))


def polyfit_csv(pattern: IntradayPattern, fit: PatternPolyFit) -> str:
    rows = ["bin,mean_tau,polyfit_value"]
    values = fit(np.arange(N_BINS))
    for j in range(N_BINS):
        m = "nan" if not pattern.defined[j] else repr(float(pattern.means[j]))
        rows.append(f"{j},{m},{float(values[j])!r}")
    return "\n".join(rows) + "\n"
