"""
Estimating the null fraction
============================

Storey's estimator and the spacing estimator on the same draws, next to
the population value the Storey estimate should settle on.
"""

import numpy as np
from distbh import StoreyConfig, SpacingConfig
from distbh.datagen import AlternativeModel, gen_mixture_batch
from distbh.oracle import MixtureSpec, storey_limit

alt = AlternativeModel(3.0)
rng = np.random.default_rng(1)

for r0 in (0.5, 0.8, 0.95):
    spec = MixtureSpec(r0, alt)
    for m in (1_000, 100_000):
        p = gen_mixture_batch(m, r0, alt, rng).pvalues
        s = StoreyConfig(0.5).estimate(p)
        sp = SpacingConfig(0.5).estimate(p)
        print(f"r0={r0:.2f} m={m:>6}  storey={s:.4f} (limit {storey_limit(spec, 0.5):.4f})  spacing={sp:.4f}")

# the Storey estimate is clipped at one; a pure-null batch often hits it
print(StoreyConfig(0.5).estimate(rng.uniform(size=500)))
