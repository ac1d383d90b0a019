"""Asymptotic quantities for the Gaussian mixture model.

Under H1 a statistic is N(mu, 1) with mu drawn from an
:class:`~distbh.datagen.AlternativeModel`; the two-sided p-value then has CDF

    F(t) = E_mu[ Phi(mu - z) + Phi(-mu - z) ],   z = Phi^{-1}(1 - t/2).

The limiting BH threshold is the largest root of F(t) = beta t, with
beta = (1/alpha - r0) / (1 - r0).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._normal import norm_cdf, norm_ppf

QUAD_TOL = 1e-10
SCAN_STEP = 1e-4
BISECT_TOL = 1e-10


class NumericError(RuntimeError):
    pass


@dataclass(frozen=True)
class MixtureSpec:
    r0: float
    alt: object  # AlternativeModel or a CDF callable on [0, 1]

    def __post_init__(self):
        if not (0.0 <= self.r0 < 1.0):
            raise ValueError(f"r0 must lie in [0, 1), got {self.r0!r}")


@dataclass(frozen=True)
class NetworkMixtureSpec:
    weights: tuple
    nodes: tuple  # MixtureSpec per node

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(self.nodes) or not w:
            raise ValueError("need one weight per node")
        if abs(math.fsum(w) - 1.0) > 1e-12 or min(w) < 0.0:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def r0_star(self):
        return math.fsum(q * s.r0 for q, s in zip(self.weights, self.nodes))

    def alt_cdf(self, t):
        """CDF of an alternative p-value drawn anywhere in the network."""
        r1 = 1.0 - self.r0_star
        num = math.fsum(q * (1.0 - s.r0) * _cdf_of(s.alt)(t)
                        for q, s in zip(self.weights, self.nodes))
        return num / r1


def _shifted_pair(mu, z):
    return norm_cdf(mu - z) + norm_cdf(-mu - z)


def alt_cdf(alt, t):
    """F(t) for the alternative model ``alt``; quadrature over mu."""
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    z = float(norm_ppf(1.0 - t / 2.0))
    total = 0.0
    for lo, hi in alt.intervals():
        if hi == lo:
            total += float(_shifted_pair(lo, z))
            continue
        val, err = quad(_shifted_pair, lo, hi, args=(z,), epsabs=QUAD_TOL * 1e-2, epsrel=0.0,
                        limit=200)
        if err > QUAD_TOL * (hi - lo):
            raise NumericError(f"quadrature error {err:.2e} at t={t}")
        total += val / (hi - lo)
    return min(max(total / len(alt.intervals()), 0.0), 1.0)


def _cdf_of(alt):
    if callable(alt):
        return alt
    return lambda t: alt_cdf(alt, t)


def mixture_cdf(spec, t):
    """G(t; r0) = r0 t + (1 - r0) F(t)."""
    return spec.r0 * t + (1.0 - spec.r0) * _cdf_of(spec.alt)(t)


def beta(alpha, r0):
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not (0.0 <= r0 < 1.0):
        raise ValueError(f"r0 must lie in [0, 1), got {r0!r}")
    return ((1.0 / alpha) - r0) / (1.0 - r0)


def largest_crossing(cdf, slope, step=SCAN_STEP, tol=BISECT_TOL):
    """sup{t in (0, 1/slope] : cdf(t) = slope t}, or 0.0 if there is none.

    Scans downward from 1/slope until cdf(t) - slope t turns positive, then
    bisects inside that step.  F - slope*t may have several roots; the
    downward scan picks the largest.
    """
    hi = 1.0 / slope
    g = lambda t: cdf(t) - slope * t  # noqa: E731
    g_hi = g(hi)
    if g_hi >= 0.0:
        return hi
    n = int(math.ceil(hi / step))
    upper = hi
    for k in range(n - 1, 0, -1):
        lower = k * step
        if g(lower) > 0.0:
            a, b = lower, upper
            while b - a > tol:
                mid = 0.5 * (a + b)
                if g(mid) > 0.0:
                    a = mid
                else:
                    b = mid
            return 0.5 * (a + b)
        upper = lower
    return 0.0


def tau_star(alpha, r0, alt):
    """Limiting BH threshold sup{t : F(t) = beta(alpha; r0) t}."""
    return largest_crossing(_cdf_of(alt), beta(alpha, r0))


def limit_fdr_power(spec, alpha):
    """Almost-sure limits of FDP and TDP for network-wide BH at level alpha.

    Returns (0, 0) when the limiting threshold collapses to zero.
    """
    if isinstance(spec, MixtureSpec):
        spec = NetworkMixtureSpec((1.0,), (spec,))
    r0 = spec.r0_star
    tau = largest_crossing(spec.alt_cdf, beta(alpha, r0))
    if tau <= 0.0:
        return 0.0, 0.0
    f = spec.alt_cdf(tau)
    g = r0 * tau + (1.0 - r0) * f
    return r0 * tau / g, f


def storey_limit(spec, lam):
    """(1 - G(lam; r0)) / (1 - lam), clamped to [0, 1]."""
    val = (1.0 - mixture_cdf(spec, lam)) / (1.0 - lam)
    return min(max(val, 0.0), 1.0)
