"""Standard normal helpers shared by the generators and the oracle.

Normal variates are produced by inversion (``ndtri`` of a uniform), not by
numpy's ziggurat sampler, so a seeded stream maps to the same statistics on
every platform that ships the same PCG64 bit generator.
"""

import numpy as np
from scipy.special import erfc, ndtr, ndtri

_SQRT2 = np.sqrt(2.0)
# smallest uniform handed to ndtri; rng.random() can return exactly 0.0
_U_FLOOR = 2.0 ** -54


def norm_cdf(x):
    return ndtr(x)


def norm_ppf(q):
    return ndtri(q)


def two_sided_pvalue(x):
    """p = 2 (1 - Phi(|x|)), evaluated as erfc(|x| / sqrt 2) to keep the tail exact."""
    return erfc(np.abs(x) / _SQRT2)


def standard_normal(rng, size):
    u = rng.random(size)
    np.maximum(u, _U_FLOOR, out=u)
    return ndtri(u)
