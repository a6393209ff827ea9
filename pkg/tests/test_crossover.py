import numpy as np
import pytest

from intertrade.crossover import detect_crossover, regime_mfdfa
from intertrade.dfa import FluctuationCurve, box_sizes, profile
from intertrade.errors import FitError
from intertrade.mfdfa import fluctuation_q, q_grid
from intertrade.synth import gen_fgn_durations, gen_piecewise_curve, gen_two_band_cascade

GRID = np.union1d(box_sizes(2 ** 16), [300])


def test_exact_piecewise_recovery():
    fit = detect_crossover(gen_piecewise_curve(0.65, 0.97, 300, GRID))
    assert not fit.no_crossover
    assert fit.s_cross == 300
    assert abs(fit.H1 - 0.65) < 1e-10 and abs(fit.H2 - 0.97) < 1e-10
    assert fit.small.sse < 1e-20 and fit.large.sse < 1e-20
    assert fit.p_value == 0.0


@pytest.mark.parametrize("alpha", [0.01, 0.5, 0.99])
def test_single_power_law_never_breaks(alpha):
    fit = detect_crossover(gen_piecewise_curve(0.85, 0.85, 300, GRID), significance=alpha)
    assert fit.no_crossover
    assert fit.H1 == fit.H2 == pytest.approx(0.85, abs=1e-12)


def test_noisy_piecewise_slopes():
    errs = []
    for seed in range(20):
        fit = detect_crossover(gen_piecewise_curve(0.65, 0.97, 300, GRID, 0.02, seed))
        errs.append(max(abs(fit.H1 - 0.65), abs(fit.H2 - 0.97)))
    assert max(errs) <= 0.03


def test_break_scales_with_box_size():
    c = gen_piecewise_curve(0.6, 1.0, 300, GRID)
    scaled = FluctuationCurve(c.q, c.s * 4, c.F, c.valid_boxes)
    assert detect_crossover(scaled).s_cross == 4 * detect_crossover(c).s_cross


def test_amplitude_does_not_move_break():
    c = gen_piecewise_curve(0.6, 1.0, 300, GRID)
    scaled = FluctuationCurve(c.q, c.s, 7.5 * c.F, c.valid_boxes)
    a, b = detect_crossover(c), detect_crossover(scaled)
    assert a.s_cross == b.s_cross and a.H1 == pytest.approx(b.H1, abs=1e-10)


def test_short_curve_rejected():
    c = gen_piecewise_curve(0.6, 1.0, 30, box_sizes(160))
    with pytest.raises(FitError):
        detect_crossover(c)


def test_fgn_has_no_crossover():
    x = gen_fgn_durations(0.7, 2 ** 16, 0.25, 1)
    c = fluctuation_q(profile(x), box_sizes(len(x)), q_grid())
    fit = detect_crossover(c)
    assert fit.no_crossover
    r = regime_mfdfa(c, None)
    assert r.small is r.large and r.s_cross is None


def test_two_band_cascade_regimes_keep_their_order():
    # fine levels strongly multifractal, coarse levels weakly: small boxes see the wide spectrum
    widths = []
    for seed in range(3):
        x = gen_two_band_cascade(0.3, 0.45, 16, 8, seed)
        c = fluctuation_q(profile(x), box_sizes(len(x)), q_grid())
        r = regime_mfdfa(c, 256)
        widths.append((r.small.width, r.large.width))
        assert r.small.hurst.s_hi <= 256 <= r.large.hurst.s_lo
    small, large = np.mean(widths, axis=0)
    assert small > 0.8 and large < 0.4 and small > large + 0.5


def test_per_q_breaks_reported():
    x = gen_two_band_cascade(0.3, 0.45, 14, 6, 0)
    c = fluctuation_q(profile(x), box_sizes(len(x)), q_grid(-2, 4, 0.5))
    r = regime_mfdfa(c, 256, per_q=True)
    assert set(r.per_q_breaks) <= set(c.q.tolist())
    assert "per_q_breaks" in r.as_dict()
