"""
Correlated noise
================
"""

import numpy as np
from distbh.datagen import Dependence, SeedPolicy, gen_noise

pol = SeedPolicy(7)

# AR(1): lag-one correlation close to rho, unit variance kept
z = gen_noise(200_000, Dependence("ar1", 0.6), pol.stream(0, 1))
print("ar1   var %.3f  lag1 %.3f" % (z.var(), np.corrcoef(z[:-1], z[1:])[0, 1]))

# blocks of 20 share one factor: correlation rho inside a block, 0 across
z = gen_noise(200_000, Dependence("block", 0.4, block=20), pol.stream(0, 1))
blocks = z.reshape(-1, 20)
print("block inside %.3f  across %.3f" % (np.corrcoef(blocks[:, 0], blocks[:, 1])[0, 1],
                                          np.corrcoef(blocks[:-1, 19], blocks[1:, 0])[0, 1]))

# same trial and node id -> same stream
a = gen_noise(5, Dependence("ar1", 0.6), pol.stream(3, 11))
b = gen_noise(5, Dependence("ar1", 0.6), pol.stream(3, 11))
print(np.array_equal(a, b))
