"""Seeded generation of per-node Gaussian statistics and two-sided p-values."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._normal import standard_normal, two_sided_pvalue
from .core import PValueBatch

BLOCK_SIZE = 20


def _check_rho(rho):
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must lie in [0, 1), got {rho!r}")


@dataclass(frozen=True)
class AlternativeModel:
    """Distribution of the mean shift mu under H1.

    mu ~ Unif[mu_base - half_width, mu_base + half_width], mirrored through 0
    with probability 1/2 when ``symmetric``.
    """

    mu_base: float
    half_width: float = 0.5
    symmetric: bool = True

    def __post_init__(self):
        if not (self.mu_base > self.half_width >= 0.0):
            raise ValueError("need mu_base > half_width >= 0")

    def intervals(self):
        lo, hi = self.mu_base - self.half_width, self.mu_base + self.half_width
        if self.symmetric:
            return [(-hi, -lo), (lo, hi)]
        return [(lo, hi)]

    def sample(self, rng, size):
        mu = self.mu_base + self.half_width * (2.0 * rng.random(size) - 1.0)
        if self.symmetric:
            mu = np.where(rng.random(size) < 0.5, -mu, mu)
        return mu


@dataclass(frozen=True)
class Dependence:
    """Within-node correlation of the statistic vector.

    kind is ``"independent"``, ``"ar1"`` (Sigma_ij = rho^|i-j|) or
    ``"block"`` (Sigma_ij = rho inside consecutive blocks of ``block``).
    """

    kind: str = "independent"
    rho: float = 0.0
    block: int = BLOCK_SIZE

    def __post_init__(self):
        if self.kind not in ("independent", "ar1", "block"):
            raise ValueError(f"unknown dependence kind {self.kind!r}")
        _check_rho(self.rho)
        if self.block < 1:
            raise ValueError("block size must be >= 1")


INDEPENDENT = Dependence()


@dataclass(frozen=True)
class NodeGenSpec:
    m: int
    m1: int
    alt: AlternativeModel
    dependence: Dependence = INDEPENDENT

    def __post_init__(self):
        if not (0 <= self.m1 <= self.m):
            raise ValueError("need 0 <= m1 <= m")


@dataclass(frozen=True)
class SeedPolicy:
    """One independent stream per (trial, node) derived from ``base_seed``."""

    base_seed: int = 0

    def stream(self, trial, node_id):
        ss = np.random.SeedSequence([self.base_seed, trial, node_id])
        return np.random.default_rng(ss)


def gen_ar1(m, rho, rng):
    """Stationary AR(1) with unit marginals: cov(x_i, x_j) = rho^|i-j|."""
    _check_rho(rho)
    z = standard_normal(rng, m)
    if m == 0:
        return z
    c = math.sqrt(1.0 - rho * rho)
    z[0] /= c  # so that x_1 = z_1 after the filter's gain
    return lfilter([c], [1.0, -rho], z)


def gen_block(m, rho, block, rng):
    """Equicorrelated blocks: x = sqrt(rho) w_b + sqrt(1 - rho) z."""
    _check_rho(rho)
    if block < 1:
        raise ValueError("block size must be >= 1")
    z = standard_normal(rng, m)
    nb = -(-m // block)
    w = standard_normal(rng, nb)
    return math.sqrt(rho) * np.repeat(w, block)[:m] + math.sqrt(1.0 - rho) * z


def gen_noise(m, dependence, rng):
    if dependence.kind == "ar1":
        return gen_ar1(m, dependence.rho, rng)
    if dependence.kind == "block":
        return gen_block(m, dependence.rho, dependence.block, rng)
    return standard_normal(rng, m)


def gen_node_batch(spec, rng):
    """Statistics for one node, converted to two-sided p-values.

    The correlated N(0, 1) noise is drawn first; ``m1`` uniformly chosen
    positions then receive an independent shift mu from ``spec.alt``.
    """
    x = gen_noise(spec.m, spec.dependence, rng)
    is_null = np.ones(spec.m, dtype=bool)
    if spec.m1:
        alt_idx = rng.permutation(spec.m)[: spec.m1]
        is_null[alt_idx] = False
        x[alt_idx] += spec.alt.sample(rng, spec.m1)
    return PValueBatch(two_sided_pvalue(x), is_null)


def gen_mixture_batch(m, r0, alt, rng):
    """i.i.d. draws from G(t; r0): each hypothesis is null with probability r0."""
    is_null = rng.random(m) < r0
    x = standard_normal(rng, m)
    n1 = int(m - np.count_nonzero(is_null))
    x[~is_null] += alt.sample(rng, n1)
    return PValueBatch(two_sided_pvalue(x), is_null)


def node_sizes(n, N, rule="uniform"):
    """Per-node p-value counts; ``power`` gives m_i = round(n^(0.2 + 0.8 i/N))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if rule == "uniform":
        return [int(n)] * N
    if rule == "power":
        return [int(round(n ** (0.2 + 0.8 * (i / N)))) for i in range(1, N + 1)]
    raise ValueError(f"unknown size rule {rule!r}")


def alt_count(r1, m):
    """floor(r1 * m), robust to r1 * m landing a hair under an integer."""
    return int(math.floor(r1 * m + 1e-9))
