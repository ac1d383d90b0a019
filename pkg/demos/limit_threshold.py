"""
Where the BH threshold settles
==============================

For a two-group mixture the BH cut converges to the largest t with
G(t) = beta * t. The oracle finds it by a scan plus bisection.
"""

import numpy as np
from distbh import bh_procedure
from distbh.datagen import AlternativeModel, gen_mixture_batch
from distbh.oracle import MixtureSpec, beta, limit_fdr_power, tau_star

alt = AlternativeModel(3.0, half_width=0.0, symmetric=False)
r0 = 0.8
tau = tau_star(0.2, r0, alt)
print("beta =", beta(0.2, r0), " tau* =", tau)
print("limit fdr, power:", limit_fdr_power(MixtureSpec(r0, alt), 0.2))

rng = np.random.default_rng(4)
for m in (10**3, 10**4, 10**5, 10**6):
    t = bh_procedure(gen_mixture_batch(m, r0, alt, rng).pvalues, 0.2).threshold
    print(f"m={m:>7}  tau_BH={t:.6f}  rel err {abs(t - tau) / tau:.4f}")
