"""Two-regime power-law fits of fluctuation curves.

The break is found by exhaustive search: every grid point that leaves at
least ``min_points`` points on each side is tried, the two segments are fit
independently in log-log (the break point belongs to both), and the lowest
total SSE wins, ties going to the smaller box size.

A break is accepted only if an F-test rejects the single straight line at
``significance`` and the slopes differ by at least ``min_slope_change``.
Points are weighted by the number of boxes behind each ``F`` value, which is
proportional to the inverse variance of ``ln F``; without this the few-box
tail at large ``s`` produces spurious breaks. Curves with unit box counts
(synthetic tables) reduce to plain OLS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dfa import MIN_FIT_POINTS, FluctuationCurve, ScalingFit, fit_loglog
from .errors import FitError
from .mfdfa import MultifractalResult, multifractal

MIN_CURVE_POINTS = 12
MIN_SLOPE_CHANGE = 0.1
# parameters of the two-segment model: two slopes, two intercepts, break location
_P_TWO = 5
_P_ONE = 2


@dataclass(frozen=True)
class CrossoverFit:
    q: float
    s_cross: int
    small: ScalingFit
    large: ScalingFit
    single: ScalingFit
    sse_two: float
    f_stat: float
    p_value: float
    no_crossover: bool

    @property
    def H1(self) -> float:
        return self.single.exponent if self.no_crossover else self.small.exponent

    @property
    def H2(self) -> float:
        return self.single.exponent if self.no_crossover else self.large.exponent

    @property
    def H1_stderr(self) -> float:
        return self.single.stderr if self.no_crossover else self.small.stderr

    @property
    def H2_stderr(self) -> float:
        return self.single.stderr if self.no_crossover else self.large.stderr

    def as_dict(self) -> dict:
        return {
            "q": self.q, "s_cross": self.s_cross, "no_crossover": self.no_crossover,
            "H1": self.H1, "H1_stderr": self.H1_stderr, "H2": self.H2, "H2_stderr": self.H2_stderr,
            "small": self.small.as_dict(), "large": self.large.as_dict(),
            "single": self.single.as_dict(),
            "sse_small": self.small.sse, "sse_large": self.large.sse,
            "sse_two": self.sse_two, "sse_single": self.single.sse,
            "f_stat": self.f_stat, "p_value": self.p_value,
        }


def detect_crossover(curve: FluctuationCurve, q: float = 2.0, significance: float = 0.01,
                     min_slope_change: float = MIN_SLOPE_CHANGE, weighted: bool = True,
                     min_points: int = MIN_FIT_POINTS) -> CrossoverFit:
    """Locate the break between the small-s and large-s scaling regimes of ``F_q``."""
    i = np.flatnonzero(curve.q == q)
    if i.size == 0:
        raise KeyError(f"q={q} not in curve")
    F = curve.F[i[0]]
    ok = np.isfinite(F) & (F > 0)
    s, F = curve.s[ok], F[ok]
    w = curve.valid_boxes[i[0]][ok].astype(float) if weighted else np.ones(len(s))
    n = len(s)
    if n < max(MIN_CURVE_POINTS, 2 * min_points - 1):
        raise FitError(f"{n} points; crossover search needs at least {MIN_CURVE_POINTS}")
    single = fit_loglog(s, F, min_points, w)

    best = None
    for b in range(min_points - 1, n - min_points + 1):
        left = fit_loglog(s[: b + 1], F[: b + 1], min_points, w[: b + 1])
        right = fit_loglog(s[b:], F[b:], min_points, w[b:])
        sse = left.sse + right.sse
        if best is None or sse < best[0]:
            best = (sse, b, left, right)
    sse_two, b, left, right = best

    # SSE below the rounding noise of ln F counts as an exact fit
    lnF = np.log(F)
    floor = float(w.sum()) * (1e-12 * max(1.0, float(np.abs(lnF).max()))) ** 2
    dof = n - _P_TWO
    if single.sse <= floor:
        f_stat, p = 0.0, 1.0
    elif sse_two <= floor or dof <= 0:
        f_stat, p = float("inf"), 0.0
    else:
        f_stat = ((single.sse - sse_two) / (_P_TWO - _P_ONE)) / (sse_two / dof)
        p = float(stats.f.sf(f_stat, _P_TWO - _P_ONE, dof))
    real = p < significance and abs(right.exponent - left.exponent) >= min_slope_change
    return CrossoverFit(float(q), int(s[b]), left, right, single, float(sse_two), float(f_stat), p,
                        no_crossover=not real)


@dataclass
class RegimeResult:
    small: MultifractalResult
    large: MultifractalResult
    s_cross: int | None
    per_q_breaks: dict | None = None

    def as_dict(self) -> dict:
        out = {"s_cross": self.s_cross, "small": self.small.as_dict(), "large": self.large.as_dict()}
        if self.per_q_breaks is not None:
            out["per_q_breaks"] = self.per_q_breaks
        return out


def _curve_with_rows(curve: FluctuationCurve, F: np.ndarray) -> FluctuationCurve:
    return FluctuationCurve(curve.q, curve.s, F, curve.valid_boxes)


def regime_mfdfa(curve: FluctuationCurve, s_cross: int | None, per_q: bool = False,
                 significance: float = 0.01, min_slope_change: float = MIN_SLOPE_CHANGE,
                 support_dim: float = 1.0) -> RegimeResult:
    """Separate multifractal analyses below and above the crossover.

    With ``s_cross=None`` (no crossover) both regimes use the full range.
    With ``per_q=True`` each q gets its own break, estimated on its own curve.
    """
    if not per_q:
        if s_cross is None:
            full = multifractal(curve, None, support_dim)
            return RegimeResult(full, full, None)
        return RegimeResult(multifractal(curve, (None, s_cross), support_dim),
                            multifractal(curve, (s_cross, None), support_dim), s_cross)

    # per-q breaks: mask each row outside its own regime, then fit as usual
    lo = np.full(curve.F.shape, np.nan)
    hi = np.full(curve.F.shape, np.nan)
    breaks = {}
    for i, q in enumerate(curve.q):
        try:
            fit = detect_crossover(curve, q, significance, min_slope_change)
        except FitError:
            continue
        sx = None if fit.no_crossover else fit.s_cross
        breaks[float(q)] = sx
        row = curve.F[i]
        lo[i] = np.where(curve.s <= (sx or curve.s[-1]), row, np.nan)
        hi[i] = np.where(curve.s >= (sx or curve.s[0]), row, np.nan)
    return RegimeResult(multifractal(_curve_with_rows(curve, lo), None, support_dim),
                        multifractal(_curve_with_rows(curve, hi), None, support_dim),
                        s_cross, breaks)
