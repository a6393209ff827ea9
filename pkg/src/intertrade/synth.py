"""Seeded generators with known scaling properties.

Each generator is a pure function of its parameters and seed. They serve as
ground truth for the estimators: fractional Gaussian noise (monofractal,
known H), the binomial multiplicative cascade (closed-form mass exponents),
exact piecewise power-law fluctuation curves, and Poisson tick streams
modulated by an intraday pattern.
"""

from __future__ import annotations

import numpy as np

from .dfa import FluctuationCurve
from .ingest import AFTERNOON, MORNING, DurationSeries, TickSeries

N_BINS = 240


def fgn_autocovariance(H: float, k) -> np.ndarray:
    """Autocovariance of unit-variance fGn at integer lags ``k``."""
    k = np.abs(np.asarray(k, dtype=float))
    return 0.5 * (np.abs(k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def gen_fgn(H: float, N: int, seed=None) -> np.ndarray:
    """Exact fractional Gaussian noise by circulant embedding (Davies-Harte).

    Parameters
    ----------
    H : float
        Hurst exponent in (0, 1).
    N : int
        Length; must be a power of two.
    seed : int or numpy Generator, optional

    Returns
    -------
    ndarray of shape (N,), zero mean and unit variance in distribution.
    """
    if not 0 < H < 1:
        raise ValueError("H must lie in (0, 1)")
    if N < 2 or N & (N - 1):
        raise ValueError("N must be a power of two")
    rng = np.random.default_rng(seed)
    r = fgn_autocovariance(H, np.arange(N + 1))
    c = np.concatenate([r, r[-2:0:-1]])  # first row of the 2N circulant
    lam = np.fft.rfft(c).real
    if lam.min() < -1e-10 * lam.max():
        raise ArithmeticError("circulant embedding is not non-negative definite")
    lam = np.clip(lam, 0.0, None)
    m = 2 * N
    # Hermitian-symmetric complex Gaussian vector, expressed on the rfft half.
    w = rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)
    w[0] = np.sqrt(2.0) * w[0].real
    w[-1] = np.sqrt(2.0) * w[-1].real
    z = np.fft.irfft(np.sqrt(lam / (2 * m)) * w, n=m) * m
    return z[:N]


def gen_fgn_durations(H: float, N: int, sigma: float = 0.25, seed=None) -> np.ndarray:
    """Positive duration-like series ``exp(sigma * x)`` with ``x`` an fGn path.

    The exponential map keeps long memory but perturbs the correlation
    structure (the exponent of the transformed series is only close to ``H``
    for small ``sigma``).
    """
    return np.exp(sigma * gen_fgn(H, N, seed))


def gen_binomial_cascade(p: float, levels: int, seed=None) -> np.ndarray:
    """Cell masses of a binomial multiplicative cascade, rescaled to unit mean.

    Each interval splits its mass into fractions ``p`` and ``1 - p``; which
    child gets ``p`` is drawn independently for every node.
    """
    return gen_two_band_cascade(p, p, levels, 0, seed)


def gen_two_band_cascade(p_fine: float, p_coarse: float, levels: int, coarse_levels: int,
                         seed=None) -> np.ndarray:
    """Cascade whose first ``coarse_levels`` splits use ``p_coarse`` and the rest ``p_fine``.

    Boxes longer than ``2**(levels - coarse_levels)`` cells inherit the
    coarse multipliers' scaling, shorter boxes the fine ones.
    """
    for p in (p_fine, p_coarse):
        if not 0 < p < 1:
            raise ValueError("weights must lie in (0, 1)")
    if not 0 <= coarse_levels <= levels:
        raise ValueError("coarse_levels must lie in [0, levels]")
    rng = np.random.default_rng(seed)
    m = np.ones(1)
    for level in range(levels):
        p = p_coarse if level < coarse_levels else p_fine
        left = np.where(rng.random(len(m)) < 0.5, p, 1.0 - p)
        nxt = np.empty(2 * len(m))
        nxt[0::2] = m * left
        nxt[1::2] = m * (1.0 - left)
        m = nxt
    return m * float(2 ** levels)


def binomial_tau(q, p: float) -> np.ndarray:
    """Mass exponents ``-log2(p**q + (1-p)**q)`` of the cascade (``tau(0) = -1``)."""
    q = np.asarray(q, dtype=float)
    return -np.log2(p ** q + (1.0 - p) ** q)


def binomial_h(q, p: float) -> np.ndarray:
    """Generalized Hurst exponents ``(1 + tau(q)) / q``; the ``q -> 0`` limit is used at 0."""
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    nz = q != 0
    out[nz] = (1.0 + binomial_tau(q[nz], p)) / q[nz]
    out[~nz] = -(np.log2(p) + np.log2(1.0 - p)) / 2.0
    return out


def binomial_alpha(q, p: float) -> np.ndarray:
    """Singularity strength ``d tau / d q`` of the cascade."""
    q = np.asarray(q, dtype=float)
    a, b = p ** q, (1.0 - p) ** q
    return -(a * np.log2(p) + b * np.log2(1.0 - p)) / (a + b)


def binomial_width(p: float) -> float:
    """Full spectrum width ``|log2((1-p)/p)|``."""
    return abs(float(np.log2((1.0 - p) / p)))


def gen_piecewise_curve(H1: float, H2: float, s_x: float, grid, noise_sigma: float = 0.0,
                        seed=None) -> FluctuationCurve:
    """Two-regime curve ``F = s**H1`` up to ``s_x``, continued continuously with slope ``H2``.

    ``noise_sigma`` applies multiplicative log-normal noise ``exp(sigma * z)``.
    """
    s = np.asarray(grid, dtype=int)
    if not (s[0] < s_x < s[-1]):
        raise ValueError("s_x must lie inside the grid")
    ls, lx = np.log(s), np.log(s_x)
    logF = np.where(s <= s_x, H1 * ls, H1 * lx + H2 * (ls - lx))
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        logF = logF + noise_sigma * rng.standard_normal(len(s))
    return FluctuationCurve([2.0], s, np.exp(logF)[None, :], np.ones((1, len(s)), dtype=int))


def inverse_u_pattern(low: float = 4.0, high: float = 10.0, afternoon_drop: float | None = None) -> np.ndarray:
    """A 240-bin inverse-U mean-duration profile, one parabola per session.

    Bins near each session's open and close get ``low``, mid-session bins
    approach ``high``. ``afternoon_drop`` overrides bin 120 to mimic the
    burst of queued orders at the afternoon open.
    """
    u = (np.arange(120) + 0.5) / 120.0
    half = low + (high - low) * 4.0 * u * (1.0 - u)
    pat = np.concatenate([half, half])
    if afternoon_drop is not None:
        pat[120] = afternoon_drop
    return pat


def gen_synthetic_ticks(pattern, days: int, seed=None, symbol: str = "SYNTH",
                        start_date: str = "2003-01-02") -> TickSeries:
    """Trade timestamps from a Poisson process whose rate is ``1 / pattern[j]`` in minute ``j``.

    Inter-arrival times are exponential with the current bin's mean. Times
    are truncated to 0.01 s, so a few trades may share a stamp (exactly as
    in real data, to be collapsed downstream).
    """
    pattern = np.asarray(getattr(pattern, "means", pattern), dtype=float)
    if pattern.shape != (N_BINS,) or not np.all(pattern > 0):
        raise ValueError("pattern must hold 240 positive mean durations")
    rng = np.random.default_rng(seed)
    counts = rng.poisson(60.0 / pattern, size=(days, N_BINS))
    total = int(counts.sum())
    flat_cell = np.repeat(np.arange(days * N_BINS), counts.ravel())
    day = flat_cell // N_BINS
    b = flat_cell % N_BINS
    offset = rng.random(total) * 60.0
    session = np.where(b < 120, MORNING, AFTERNOON)
    t = (b % 120) * 60.0 + offset
    cs = np.floor(t * 100.0).astype(np.int64)
    order = np.lexsort((cs, session, day))
    dates = _business_dates(start_date, days)
    return TickSeries(symbol, day[order], session[order], cs[order], dates)


def _business_dates(start: str, days: int) -> list[str]:
    d = np.busday_offset(np.datetime64(start), np.arange(days), roll="forward")
    return [str(x) for x in d]



def gen_two_regime_durations(N: int, H_large: float = 0.95, sigma: float = 0.4, seed=None) -> np.ndarray:
    """Exponential noise modulated by ``exp(sigma * fGn(H_large))``.

    Short boxes see the uncorrelated exponential factor (exponent near 0.5);
    long boxes see the persistent modulation, giving a crossover to a larger
    exponent at a scale set by ``sigma``.
    """
    rng = np.random.default_rng(seed)
    mod = gen_fgn(H_large, N, rng)
    return rng.exponential(size=N) * np.exp(sigma * mod)


def gen_iid_exp(N: int, mean: float = 1.0, seed=None) -> np.ndarray:
    return np.random.default_rng(seed).exponential(mean, size=N)


def as_duration_series(values, trades_per_day: int = 2000, symbol: str = "SYNTH") -> DurationSeries:
    """Wrap a bare positive series as durations spread evenly over trading days.

    Consecutive blocks of ``trades_per_day`` values form one day; within a
    day the values are assigned to minute bins in proportion to position.
    """
    tau = np.asarray(values, dtype=float)
    if not np.all(tau > 0):
        raise ValueError("durations must be positive")
    i = np.arange(len(tau))
    day = i // trades_per_day
    b = (i % trades_per_day) * N_BINS // trades_per_day
    return DurationSeries(symbol, tau, day, b, (b >= N_BINS // 2).astype(np.int8),
                          metadata={"units": "s", "n_days": int(day.max()) + 1 if len(tau) else 0})
