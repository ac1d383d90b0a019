"""BH step-up procedure, Bonferroni correction and per-trial error metrics."""

from dataclasses import dataclass, field

import numpy as np


class InputDomainError(ValueError):
    """Raised for p-values outside [0, 1] or an invalid test size."""


class ConsistencyError(ValueError):
    """Raised when a result does not belong to the batch it is scored against."""


def _as_pvalues(pvalues):
    p = np.asarray(pvalues, dtype=float).reshape(-1)
    if p.size and not (np.all(p >= 0.0) and np.all(p <= 1.0)):
        raise InputDomainError("p-values must lie in [0, 1]")
    return p


def _check_alpha(alpha):
    if not (0.0 < alpha <= 1.0):
        raise InputDomainError(f"alpha must lie in (0, 1], got {alpha!r}")


@dataclass(frozen=True)
class PValueBatch:
    """One node's p-values with ground-truth labels (True = null)."""

    pvalues: np.ndarray
    is_null: np.ndarray

    def __post_init__(self):
        p = _as_pvalues(self.pvalues)
        lab = np.asarray(self.is_null, dtype=bool).reshape(-1)
        if lab.shape != p.shape:
            raise InputDomainError("pvalues and is_null must have equal length")
        object.__setattr__(self, "pvalues", p)
        object.__setattr__(self, "is_null", lab)

    @property
    def m(self):
        return int(self.pvalues.size)

    @property
    def m0(self):
        return int(np.count_nonzero(self.is_null))

    @property
    def m1(self):
        return self.m - self.m0


@dataclass(frozen=True)
class BhResult:
    k_hat: int
    threshold: float
    rejected: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls):
        return cls(0, 0.0, np.empty(0, dtype=np.intp))


@dataclass(frozen=True)
class TrialMetrics:
    R: int
    V: int
    fdp: float
    tdp: float


def bh_k_hat(sorted_p, alpha):
    """Largest k with p_(k) <= alpha k / m, 0 if none.

    ``sorted_p`` is ascending along its last axis; stacked rows give an
    array of counts.
    """
    sorted_p = np.asarray(sorted_p)
    m = sorted_p.shape[-1]
    if m == 0:
        return 0 if sorted_p.ndim == 1 else np.zeros(sorted_p.shape[:-1], dtype=np.intp)
    crit = alpha * np.arange(1, m + 1, dtype=float) / m
    hits = sorted_p <= crit
    if hits.ndim == 1:
        idx = np.flatnonzero(hits)
        return int(idx[-1]) + 1 if idx.size else 0
    last = m - np.argmax(hits[..., ::-1], axis=-1)
    return np.where(hits.any(axis=-1), last, 0)


def bh_procedure(pvalues, alpha, *, sorted_pvalues=None):
    """Benjamini-Hochberg step-up procedure at level ``alpha``.

    Rejects every p-value at or below ``alpha * k_hat / m``, so ties that
    straddle rank ``k_hat`` are all rejected and the result does not depend
    on input order.

    ``sorted_pvalues`` may be passed when the caller already holds the
    ascending copy (the protocol sorts once for the estimator and for BH).
    """
    _check_alpha(alpha)
    p = _as_pvalues(pvalues)
    if p.size == 0:
        return BhResult.empty()
    s = np.sort(p) if sorted_pvalues is None else sorted_pvalues
    k = bh_k_hat(s, alpha)
    if k == 0:
        return BhResult.empty()
    threshold = alpha * k / p.size
    rejected = np.flatnonzero(p <= threshold)
    return BhResult(int(rejected.size), threshold, rejected)


def bonferroni(pvalues, alpha):
    """Indices with p <= alpha / m."""
    _check_alpha(alpha)
    p = _as_pvalues(pvalues)
    if p.size == 0:
        return np.empty(0, dtype=np.intp)
    return np.flatnonzero(p <= alpha / p.size)


def trial_metrics(batch, result):
    rej = np.asarray(result.rejected, dtype=np.intp)
    if rej.size and (rej.min() < 0 or rej.max() >= batch.m):
        raise ConsistencyError("rejected index outside the batch")
    R = int(rej.size)
    V = int(np.count_nonzero(batch.is_null[rej]))
    return TrialMetrics(R=R, V=V, fdp=V / max(R, 1), tdp=(R - V) / max(batch.m1, 1))


def aggregate_metrics(trials):
    """Mean FDP and mean TDP over trials: the Monte-Carlo FDR and power."""
    trials = list(trials)
    if not trials:
        raise ValueError("need at least one trial")
    fdr = float(np.mean([t.fdp for t in trials]))
    power = float(np.mean([t.tdp for t in trials]))
    return fdr, power
