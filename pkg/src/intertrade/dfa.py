"""Detrended fluctuation analysis of a (duration) series.

The profile is the plain cumulative sum of the series. Boxes of size ``s``
tile the profile from the left; when ``s`` does not divide the length, a
second tiling anchored at the right end is added so that no sample is left
uncovered. Each box is detrended with a least-squares polynomial (cubic by
default) and the RMS of the residuals is the local fluctuation ``f_k(s)``.

Summation order is fixed for a given input: box variances are reduced per
row by numpy, and box means by numpy's pairwise summation, so results are
bit-identical between runs and independent of the order in which box sizes
or ``q`` values are visited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BoxSizeError, FitError

S_MIN = 20
DETREND_ORDER = 3
GRID_PER_DECADE = 30

EXACT = "exact"
BOTH_ENDS = "both_ends"


def profile(series) -> np.ndarray:
    """Cumulative sum ``y_i = sum_{j<=i} x_j`` of a series.

    Accepts a :class:`~intertrade.ingest.DurationSeries` or any 1-D array.
    """
    x = np.asarray(getattr(series, "tau", series), dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("profile needs a non-empty 1-D series")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return np.cumsum(x)


@dataclass(frozen=True)
class BoxPartition:
    """Boxes of equal size ``size`` covering ``range(n)`` (0-based starts)."""

    n: int
    size: int
    mode: str
    starts: np.ndarray

    @property
    def n_boxes(self) -> int:
        return len(self.starts)

    @property
    def boxes(self) -> list[range]:
        return [range(int(a), int(a) + self.size) for a in self.starts]


def partition(n: int, s: int, s_min: int = S_MIN, detrend_order: int = DETREND_ORDER) -> BoxPartition:
    """Cover ``n`` points with boxes of size ``s``.

    ``EXACT`` when ``s`` divides ``n`` (``n/s`` boxes), otherwise
    ``BOTH_ENDS``: ``floor(n/s)`` boxes from the left and as many from the
    right.
    """
    n, s = int(n), int(s)
    lower = max(s_min, detrend_order + 2)
    if s < lower or s > n // 4:
        raise BoxSizeError(f"box size {s} outside [{lower}, {n // 4}] for n={n}")
    ns = n // s
    left = np.arange(ns) * s
    if n % s == 0:
        return BoxPartition(n, s, EXACT, left)
    right = (n - ns * s) + np.arange(ns) * s
    return BoxPartition(n, s, BOTH_ENDS, np.concatenate([left, right]))


def box_sizes(n: int, s_min: int = S_MIN, s_max: int | None = None,
              per_decade: int = GRID_PER_DECADE) -> np.ndarray:
    """Log-spaced integer box sizes in ``[s_min, s_max]`` (``s_max`` defaults to ``n // 4``)."""
    if s_max is None:
        s_max = n // 4
    if s_max < s_min:
        raise BoxSizeError(f"series too short: n/4 = {n // 4} < s_min = {s_min}")
    if s_max == s_min:
        return np.array([s_min])
    decades = np.log10(s_max / s_min)
    num = int(np.ceil(per_decade * decades)) + 1
    grid = np.round(np.logspace(np.log10(s_min), np.log10(s_max), num)).astype(int)
    return np.unique(np.clip(grid, s_min, s_max))


@lru_cache(maxsize=512)
def _basis(s: int, order: int) -> np.ndarray:
    # Orthonormal basis of polynomials of degree <= order sampled on s points,
    # built from Legendre polynomials on [-1, 1] to keep the QR well conditioned.
    if s < order + 2:
        raise BoxSizeError(f"box size {s} leaves no residual degree of freedom for order {order}")
    x = np.linspace(-1.0, 1.0, s)
    v = np.polynomial.legendre.legvander(x, order)
    q, r = np.linalg.qr(v)
    d = np.abs(np.diag(r))
    if d.min() < 1e-10 * d.max():
        raise FitError(f"numerically singular detrending basis (s={s}, order={order})")
    q.setflags(write=False)
    return q


def _detrended_variance(boxes: np.ndarray, order: int) -> np.ndarray:
    """Mean squared polynomial-fit residual of every row of ``boxes``."""
    q = _basis(boxes.shape[1], order)
    centered = boxes - boxes.mean(axis=1, keepdims=True)
    resid = centered - (centered @ q) @ q.T
    return np.mean(resid * resid, axis=1)


def local_fluctuation(segment, detrend_order: int = DETREND_ORDER) -> float:
    """RMS residual ``f_k`` of one profile segment after polynomial detrending."""
    seg = np.asarray(segment, dtype=float)
    return float(np.sqrt(_detrended_variance(seg[None, :], detrend_order)[0]))


def box_variances(y: np.ndarray, s: int, detrend_order: int = DETREND_ORDER,
                  s_min: int = S_MIN) -> np.ndarray:
    """Squared local fluctuations ``f_k(s)**2`` over all boxes of the partition."""
    y = np.asarray(y, dtype=float)
    part = partition(len(y), s, s_min=s_min, detrend_order=detrend_order)
    boxes = y[part.starts[:, None] + np.arange(s)]
    return _detrended_variance(boxes, detrend_order)


@dataclass
class FluctuationCurve:
    """Fluctuation function ``F[q, s]`` with the number of boxes used per cell.

    Cells where no box was usable hold ``nan`` and a zero count.
    """

    q: np.ndarray
    s: np.ndarray
    F: np.ndarray
    valid_boxes: np.ndarray

    def __post_init__(self):
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float))
        self.s = np.asarray(self.s, dtype=int)
        self.F = np.atleast_2d(np.asarray(self.F, dtype=float))
        self.valid_boxes = np.atleast_2d(np.asarray(self.valid_boxes, dtype=int))
        if self.F.shape != (len(self.q), len(self.s)) or self.valid_boxes.shape != self.F.shape:
            raise ValueError("F and valid_boxes must have shape (len(q), len(s))")

    def row(self, q: float) -> np.ndarray:
        idx = np.flatnonzero(self.q == q)
        if idx.size == 0:
            raise KeyError(f"q={q} not in curve")
        return self.F[idx[0]]

    def restrict(self, s_lo=None, s_hi=None) -> "FluctuationCurve":
        lo = self.s[0] if s_lo is None else s_lo
        hi = self.s[-1] if s_hi is None else s_hi
        m = (self.s >= lo) & (self.s <= hi)
        return FluctuationCurve(self.q, self.s[m], self.F[:, m], self.valid_boxes[:, m])

    def to_csv(self) -> str:
        lines = ["q,s,F,valid_boxes"]
        for i, q in enumerate(self.q):
            for j, s in enumerate(self.s):
                lines.append(f"{_fmt(q)},{s},{_fmt(self.F[i, j])},{self.valid_boxes[i, j]}")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    x = float(x)
    return "nan" if np.isnan(x) else repr(x)


def fluctuation_f2(y, sizes, detrend_order: int = DETREND_ORDER, s_min: int = S_MIN) -> FluctuationCurve:
    """Second-order fluctuation ``F_2(s) = sqrt(mean_k f_k(s)**2)`` over every box."""
    y = np.asarray(y, dtype=float)
    sizes = np.asarray(sizes, dtype=int)
    F = np.empty(len(sizes))
    counts = np.empty(len(sizes), dtype=int)
    for j, s in enumerate(sizes):
        f2 = box_variances(y, int(s), detrend_order, s_min)
        F[j] = np.sqrt(np.mean(f2))
        counts[j] = len(f2)
    return FluctuationCurve([2.0], sizes, F[None, :], counts[None, :])


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    stderr: float
    sse: float
    r2: float
    n: int


def ols(x, y, weights=None) -> LinearFit:
    """Least squares of ``y`` on ``x`` (weighted if ``weights`` is given) with the slope standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones(len(x)) if weights is None else np.asarray(weights, dtype=float)
    n = len(x)
    if n < 2:
        raise FitError("need at least two points")
    xm = float(w @ x) / float(w.sum())
    ym = float(w @ y) / float(w.sum())
    dx, dy = x - xm, y - ym
    sxx = float((w * dx) @ dx)
    if sxx == 0.0:
        raise FitError("constant abscissa")
    slope = float((w * dx) @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    sse = float((w * resid) @ resid)
    syy = float((w * dy) @ dy)
    stderr = float(np.sqrt(sse / (n - 2) / sxx)) if n > 2 else float("nan")
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    return LinearFit(slope, float(intercept), stderr, sse, r2, n)


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit ``F(s) ~ s**H`` over ``[s_lo, s_hi]``."""

    exponent: float
    stderr: float
    s_lo: int
    s_hi: int
    n_points: int
    r2: float
    intercept: float = field(default=0.0)
    sse: float = field(default=0.0)

    @property
    def eta(self) -> float:
        """Power-spectrum exponent ``2H - 1``."""
        return 2.0 * self.exponent - 1.0

    @property
    def gamma(self) -> float:
        """Autocorrelation exponent ``2 - 2H``."""
        return 2.0 - 2.0 * self.exponent

    def as_dict(self) -> dict:
        return {
            "H": self.exponent, "stderr": self.stderr, "s_lo": self.s_lo, "s_hi": self.s_hi,
            "n_points": self.n_points, "r2": self.r2, "eta": self.eta, "gamma": self.gamma,
        }


MIN_FIT_POINTS = 5


def fit_loglog(s, F, min_points: int = MIN_FIT_POINTS, weights=None) -> ScalingFit:
    """Fit ``ln F = c + H ln s`` over the finite, positive entries of ``F``."""
    s = np.asarray(s)
    F = np.asarray(F, dtype=float)
    ok = np.isfinite(F) & (F > 0)
    s, F = s[ok], F[ok]
    if weights is not None:
        weights = np.asarray(weights, dtype=float)[ok]
    if len(s) < min_points:
        raise FitError(f"{len(s)} usable points, need at least {min_points}")
    lf = ols(np.log(s), np.log(F), weights)
    return ScalingFit(lf.slope, lf.stderr, int(s[0]), int(s[-1]), lf.n, lf.r2, lf.intercept, lf.sse)


def fit_hurst(curve: FluctuationCurve, s_range=None, q: float = 2.0) -> ScalingFit:
    """Hurst index from an OLS fit of ``ln F_q`` on ``ln s`` inside ``s_range``."""
    lo, hi = (None, None) if s_range is None else s_range
    sub = curve.restrict(lo, hi)
    return fit_loglog(sub.s, sub.row(q))


def detrended_fluctuation(series, s_min: int = S_MIN, s_max: int | None = None, detrend_order: int = DETREND_ORDER,
        per_decade: int = GRID_PER_DECADE) -> tuple[FluctuationCurve, ScalingFit]:
    """Convenience wrapper: profile, default grid, ``F_2`` and a single full-range fit."""
    y = profile(series)
    sizes = box_sizes(len(y), s_min, s_max, per_decade)
    curve = fluctuation_f2(y, sizes, detrend_order, s_min)
    return curve, fit_hurst(curve)
