"""Estimators of (an upper bound on) the local null proportion r0."""

import math
from dataclasses import dataclass

import numpy as np

from .core import _as_pvalues


class EstimatorConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StoreyConfig:
    lam: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise EstimatorConfigError(f"lambda must lie in (0, 1), got {self.lam!r}")

    def estimate(self, pvalues, sorted_pvalues=None):
        return storey_estimate(pvalues, self, sorted_pvalues=sorted_pvalues)


@dataclass(frozen=True)
class SpacingConfig:
    l: float = 0.5  # noqa: E741

    def __post_init__(self):
        if not self.l > 0.0:
            raise EstimatorConfigError(f"l must be positive, got {self.l!r}")

    def estimate(self, pvalues, sorted_pvalues=None):
        return spacing_estimate(pvalues, self, sorted_pvalues=sorted_pvalues)


def _nonempty(pvalues):
    p = _as_pvalues(pvalues)
    if p.size == 0:
        raise ValueError("estimator needs at least one p-value")
    return p


def empirical_cdf(pvalues, t):
    p = _nonempty(pvalues)
    return np.count_nonzero(p <= t) / p.size


def storey_estimate(pvalues, cfg, *, sorted_pvalues=None):
    """min{(1 - G_m(lam)) / (1 - lam), 1} with G_m the empirical CDF."""
    if not isinstance(cfg, StoreyConfig):
        cfg = StoreyConfig(cfg)
    if sorted_pvalues is not None and sorted_pvalues.size:
        below = np.searchsorted(sorted_pvalues, cfg.lam, side="right")
        g = below / sorted_pvalues.size
    else:
        g = empirical_cdf(pvalues, cfg.lam)
    return min((1.0 - g) / (1.0 - cfg.lam), 1.0)


def spacing_window(m, l):  # noqa: E741
    """Half-width r_m = max(1, floor(m^(4/5) * (ln m)^(-2l)))."""
    if m < 2:
        return 1
    return max(1, math.floor(m ** 0.8 * math.log(m) ** (-2.0 * l)))


def spacing_estimate(pvalues, cfg, *, sorted_pvalues=None):
    """Largest-spacing estimator min{2 r_m / (m V_m), 1}.

    V_m is the widest gap P_(j+r_m) - P_(j-r_m) over r_m+1 <= j <= m-r_m.
    Returns 1.0 when m < 2 r_m + 2 (too few p-values for the window).
    """
    if not isinstance(cfg, SpacingConfig):
        cfg = SpacingConfig(cfg)
    s = np.sort(_nonempty(pvalues)) if sorted_pvalues is None else sorted_pvalues
    m = s.size
    if m == 0:
        raise ValueError("estimator needs at least one p-value")
    r = spacing_window(m, cfg.l)
    if m < 2 * r + 2:
        return 1.0
    # 0-based: s[j-1+r] - s[j-1-r] for j = r+1 .. m-r
    v = float(np.max(s[2 * r:] - s[: m - 2 * r]))
    if v <= 0.0:
        return 1.0
    return min(2.0 * r / (m * v), 1.0)
