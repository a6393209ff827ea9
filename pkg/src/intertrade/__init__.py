"""Long-memory and multifractal analysis of intertrade durations."""

from .crossover import CrossoverFit, detect_crossover, regime_mfdfa
from .dfa import (FluctuationCurve, ScalingFit, box_sizes, detrended_fluctuation, fit_hurst, fluctuation_f2,
                  local_fluctuation, partition, profile)
from .ingest import (DurationSeries, TickSeries, collapse_simultaneous, compute_durations,
                     parse_durations, parse_ticks, read_durations, read_ticks, serialize_ticks)
from .intraday import adjust, bin_mean_durations, intraday_pattern, pattern_polyfit
from .mfdfa import (fluctuation_q, generalized_hurst, legendre_spectrum, mass_exponents,
                    multifractal, q_grid)
from .pipeline import AnalysisConfig, analyze_instrument, analyze_series, run_analysis

__version__ = "0.1.0"
