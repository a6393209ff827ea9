"""
Two scaling regimes
===================

A fluctuation curve that bends at s = 300 and a simulated duration series
whose memory only shows at large scales.
"""

import numpy as np

from intertrade import box_sizes, profile
from intertrade.crossover import detect_crossover, regime_mfdfa
from intertrade.mfdfa import fluctuation_q, q_grid
from intertrade.synth import gen_piecewise_curve, gen_two_regime_durations

grid = np.union1d(box_sizes(2 ** 16), [300])
for sigma in (0.0, 0.02):
    fit = detect_crossover(gen_piecewise_curve(0.65, 0.97, 300, grid, sigma, seed=3))
    print(f"noise {sigma:.2f}: s_x = {fit.s_cross}, H1 = {fit.H1:.4f}, H2 = {fit.H2:.4f}, "
          f"p = {fit.p_value:.2g}")

# %%
# Now a series rather than a curve.
x = gen_two_regime_durations(2 ** 18, seed=2)
curve = fluctuation_q(profile(x), box_sizes(len(x)), q_grid())
fit = detect_crossover(curve)
print(f"\ntwo-regime series: s_x = {fit.s_cross}, H1 = {fit.H1:.3f}, H2 = {fit.H2:.3f}")
regimes = regime_mfdfa(curve, None if fit.no_crossover else fit.s_cross)
print(f"spectrum width below the break {regimes.small.width:.3f}, above {regimes.large.width:.3f}")
