"""Multifractal DFA: q-order fluctuations, h(q), tau(q) and the f(alpha) spectrum."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dfa import (DETREND_ORDER, MIN_FIT_POINTS, S_MIN, FluctuationCurve, box_variances,
                  fit_loglog)
from .errors import FitError

ZERO_FLOOR = 1e-12


def q_grid(q_min: float = -4.0, q_max: float = 6.0, step: float = 0.25) -> np.ndarray:
    """Evenly spaced q values; 0 and 2 must fall on the grid."""
    n = int(round((q_max - q_min) / step))
    q = q_min + step * np.arange(n + 1)
    q[np.abs(q) < 1e-9 * step] = 0.0
    q = np.round(q, 12)
    if not (np.any(q == 0.0) and np.any(q == 2.0)):
        raise ValueError("q grid must contain 0 and 2")
    return q


def _power_means(f2: np.ndarray, q: np.ndarray, floor: float) -> tuple[np.ndarray, np.ndarray]:
    # f2 holds squared box fluctuations for one box size.
    fk = np.sqrt(f2)
    out = np.full(len(q), np.nan)
    counts = np.zeros(len(q), dtype=int)
    positive = fk >= floor
    for i, qq in enumerate(q):
        use = fk if qq > 0 else fk[positive]
        if use.size == 0:
            continue
        counts[i] = use.size
        ref = use.max()
        if ref == 0.0:
            continue
        r = use / ref
        if qq == 0.0:
            out[i] = ref * np.exp(np.mean(np.log(r)))
        else:
            out[i] = ref * np.mean(r ** qq) ** (1.0 / qq)
    return out, counts


def fluctuation_q(y, sizes, q, detrend_order: int = DETREND_ORDER, s_min: int = S_MIN,
                  zero_floor: float | None = None) -> FluctuationCurve:
    """Generalized fluctuation ``F_q(s)`` over every box of every size.

    ``F_q = (mean f_k**q)**(1/q)`` and ``F_0 = exp(mean ln f_k)``. For
    ``q <= 0`` boxes with ``f_k`` below the zero floor are left out; the
    default floor is ``1e-12`` times the RMS of the series increments.
    """
    y = np.asarray(y, dtype=float)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    sizes = np.asarray(sizes, dtype=int)
    if zero_floor is None:
        inc = np.diff(y, prepend=0.0)
        zero_floor = ZERO_FLOOR * float(np.sqrt(np.mean(inc * inc)))
    F = np.empty((len(q), len(sizes)))
    counts = np.empty((len(q), len(sizes)), dtype=int)
    for j, s in enumerate(sizes):
        F[:, j], counts[:, j] = _power_means(box_variances(y, int(s), detrend_order, s_min), q, zero_floor)
    return FluctuationCurve(q, sizes, F, counts)


@dataclass
class GeneralizedHurst:
    q: np.ndarray
    h: np.ndarray
    stderr: np.ndarray
    s_lo: int
    s_hi: int
    omitted: list = field(default_factory=list)

    def at(self, q: float) -> float:
        return float(self.h[np.flatnonzero(self.q == q)[0]])

    def to_csv(self) -> str:
        rows = ["q,h,h_stderr"] + [f"{q!r},{h!r},{e!r}" for q, h, e in
                                   zip(self.q.tolist(), self.h.tolist(), self.stderr.tolist())]
        return "\n".join(rows) + "\n"


def generalized_hurst(curve: FluctuationCurve, s_range=None,
                      min_points: int = MIN_FIT_POINTS) -> GeneralizedHurst:
    """Per-q OLS slope of ``ln F_q`` on ``ln s`` within ``s_range``.

    A q whose curve has fewer than ``min_points`` usable cells is dropped
    with a warning and listed in ``omitted``.
    """
    lo, hi = (None, None) if s_range is None else s_range
    sub = curve.restrict(lo, hi)
    qs, hs, es, omitted = [], [], [], []
    s_lo, s_hi = None, None
    for i, q in enumerate(sub.q):
        try:
            fit = fit_loglog(sub.s, sub.F[i], min_points)
        except FitError:
            omitted.append(float(q))
            continue
        qs.append(q)
        hs.append(fit.exponent)
        es.append(fit.stderr)
        s_lo = fit.s_lo if s_lo is None else min(s_lo, fit.s_lo)
        s_hi = fit.s_hi if s_hi is None else max(s_hi, fit.s_hi)
    if omitted:
        warnings.warn(f"h(q) omitted for q = {omitted}: too few valid points", RuntimeWarning,
                      stacklevel=2)
    if not qs:
        raise FitError("no q value has enough valid points")
    return GeneralizedHurst(np.array(qs), np.array(hs), np.array(es), s_lo, s_hi, omitted)


@dataclass
class MassExponents:
    q: np.ndarray
    tau: np.ndarray
    stderr: np.ndarray
    support_dim: float = 1.0

    def to_csv(self) -> str:
        rows = ["q,tau"] + [f"{q!r},{t!r}" for q, t in zip(self.q.tolist(), self.tau.tolist())]
        return "\n".join(rows) + "\n"


def mass_exponents(gh: GeneralizedHurst, support_dim: float = 1.0) -> MassExponents:
    """``tau(q) = q h(q) - D_f``."""
    return MassExponents(gh.q.copy(), gh.q * gh.h - support_dim, np.abs(gh.q) * gh.stderr, support_dim)


@dataclass
class SingularitySpectrum:
    """Legendre spectrum points ``(alpha(q), f(alpha(q)))``."""

    q: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    alpha_stderr: np.ndarray
    width: float
    width_stderr: float
    concave: bool
    q_range: tuple[float, float]

    @property
    def alpha_min(self) -> float:
        return float(self.alpha.min())

    @property
    def alpha_max(self) -> float:
        return float(self.alpha.max())

    def to_csv(self) -> str:
        rows = ["q,alpha,f_alpha"] + [f"{q!r},{a!r},{f!r}" for q, a, f in
                                      zip(self.q.tolist(), self.alpha.tolist(), self.f.tolist())]
        return "\n".join(rows) + "\n"


def legendre_spectrum(me: MassExponents) -> SingularitySpectrum:
    """``alpha = d tau / d q`` by finite differences, ``f = q alpha - tau``.

    Central differences inside the grid, one-sided at the ends. A
    non-monotone ``alpha`` (non-concave ``tau``) still yields a spectrum but
    sets ``concave = False``.
    """
    q, tau, se = me.q, me.tau, me.stderr
    if len(q) < 3:
        raise FitError("need tau on at least three q values")
    alpha = np.gradient(tau, q)
    # error propagation with independent tau errors
    ase = np.empty_like(alpha)
    ase[1:-1] = np.hypot(se[2:], se[:-2]) / (q[2:] - q[:-2])
    ase[0] = np.hypot(se[1], se[0]) / (q[1] - q[0])
    ase[-1] = np.hypot(se[-1], se[-2]) / (q[-1] - q[-2])
    f = q * alpha - tau
    imax, imin = int(np.argmax(alpha)), int(np.argmin(alpha))
    width = float(alpha[imax] - alpha[imin])
    concave = bool(np.all(np.diff(alpha) <= 1e-12 * max(1.0, np.abs(alpha).max())))
    return SingularitySpectrum(q.copy(), alpha, f, ase, width, float(np.hypot(ase[imax], ase[imin])),
                               concave, (float(q[0]), float(q[-1])))


@dataclass
class MultifractalResult:
    hurst: GeneralizedHurst
    tau: MassExponents
    spectrum: SingularitySpectrum

    @property
    def width(self) -> float:
        return self.spectrum.width

    def as_dict(self) -> dict:
        sp = self.spectrum
        return {
            "s_range": [self.hurst.s_lo, self.hurst.s_hi],
            "q": self.hurst.q.tolist(),
            "h": self.hurst.h.tolist(),
            "h_stderr": self.hurst.stderr.tolist(),
            "tau": self.tau.tau.tolist(),
            "alpha": sp.alpha.tolist(),
            "f_alpha": sp.f.tolist(),
            "delta_alpha": sp.width,
            "delta_alpha_stderr": sp.width_stderr,
            "q_range_effective": list(sp.q_range),
            "q_omitted": self.hurst.omitted,
            "concave": sp.concave,
        }


def multifractal(curve: FluctuationCurve, s_range=None, support_dim: float = 1.0) -> MultifractalResult:
    """h(q), tau(q) and f(alpha) from one fluctuation table over one scaling range."""
    gh = generalized_hurst(curve, s_range)
    me = mass_exponents(gh, support_dim)
    return MultifractalResult(gh, me, legendre_spectrum(me))
