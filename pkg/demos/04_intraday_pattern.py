"""
Removing the intraday pattern
=============================

Synthetic ticks over 250 trading days, busier near the open and the close.
"""

import numpy as np

from intertrade import detrended_fluctuation
from intertrade.ingest import collapse_simultaneous, compute_durations
from intertrade.intraday import adjust, bin_mean_durations, intraday_pattern, pattern_polyfit
from intertrade.synth import gen_synthetic_ticks, inverse_u_pattern

ticks = gen_synthetic_ticks(inverse_u_pattern(5, 8), days=250, seed=7)
series = compute_durations(collapse_simultaneous(ticks))
print(f"{len(ticks)} trades, {len(series)} durations")

pattern = intraday_pattern(bin_mean_durations(series))
poly = pattern_polyfit(pattern, 4)
for j in (0, 30, 60, 90, 119, 120, 180, 239):
    print(f"bin {j:3d}: mean {pattern.means[j]:.2f} s, quartic {float(poly(j)):.2f} s")

adjusted = adjust(series, pattern)
h_raw = detrended_fluctuation(series.tau)[1].exponent
h_adj = detrended_fluctuation(adjusted.tau)[1].exponent
print(f"\nH raw {h_raw:.3f}, adjusted {h_adj:.3f}")
