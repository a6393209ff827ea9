"""
Singularity spectrum of a binomial cascade
==========================================

The cascade has closed-form mass exponents; compare them with what the
q-order fluctuation analysis recovers from one realization.
"""

import numpy as np

from intertrade import box_sizes, profile
from intertrade.mfdfa import fluctuation_q, multifractal, q_grid
from intertrade.synth import binomial_tau, binomial_width, gen_binomial_cascade

q = q_grid()
x = gen_binomial_cascade(0.3, 16, seed=0)
res = multifractal(fluctuation_q(profile(x), box_sizes(len(x)), q))

print("   q    tau_hat   tau_exact")
for qq, t in zip(res.tau.q, res.tau.tau):
    if qq == int(qq):
        print(f"{qq:5.1f}  {t:8.3f}  {float(binomial_tau(qq, 0.3)):9.3f}")

print(f"\nspectrum width {res.width:.3f} +- {res.spectrum.width_stderr:.3f}, "
      f"closed form {binomial_width(0.3):.3f}")
print("concave tau:", res.spectrum.concave)
