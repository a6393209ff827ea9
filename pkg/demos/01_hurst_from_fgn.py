"""
Long memory in a synthetic duration series
==========================================

Fractional Gaussian noise has a known Hurst index, which makes it a
convenient first check of the fluctuation curve.
"""

import numpy as np

from intertrade import detrended_fluctuation
from intertrade.synth import gen_fgn, gen_iid_exp

# %%
# Two inputs: persistent noise (H = 0.7) and memoryless exponential waits.
persistent = gen_fgn(0.7, 2 ** 16, seed=1)
memoryless = gen_iid_exp(2 ** 16, mean=5.0, seed=1)

for label, x in [("fGn H=0.7", persistent), ("iid exponential", memoryless)]:
    curve, fit = detrended_fluctuation(x)
    print(f"{label:>16}: H = {fit.exponent:.3f} +- {fit.stderr:.3f}  "
          f"(eta = {fit.eta:.2f}, gamma = {fit.gamma:.2f})")

# %%
# The curve itself, a few rows of it.
curve, _ = detrended_fluctuation(persistent)
F = curve.row(2.0)
for s, f in list(zip(curve.s, F))[::15]:
    print(f"s = {s:6d}   F(s) = {f:10.3f}   F/s^0.7 = {f / s ** 0.7:.3f}")
