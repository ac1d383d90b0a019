"""Monte-Carlo reproduction of the five network experiments.

Each trial draws fresh batches for all N nodes and scores three methods on the
same data:

``distributed``  the three-step protocol (one report and one broadcast per node);
``central``      BH at alpha on the pooled p-values of every node;
``local_only``   no communication, node i runs BH at alpha * m_i / m.

Error rates are network-wide: V and R are summed over the union of the
per-node rejection sets.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import TrialMetrics, bh_procedure, trial_metrics
from .datagen import AlternativeModel, Dependence, NodeGenSpec, SeedPolicy, alt_count, gen_node_batch, node_sizes
from .estimators import SpacingConfig, StoreyConfig
from .protocol import NodeState, StarTransport, local_bh, run_round

METHODS = ("distributed", "central", "local_only")
CSV_HEADER = ["experiment", "method", "grid_param", "grid_value", "fdr", "fdr_se",
              "power", "power_se", "trials", "seed"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: int
    grid_param: str  # "n", "mu_base" or "rho"
    grid: tuple
    alpha: float = 0.2
    nodes: int = 50
    trials: int = 200
    n: int = 10_000  # used when n is not the grid parameter
    size_rule: str = "uniform"
    mu_base: float = 3.0
    half_width: float = 0.5
    heterogeneous_mu: bool = False  # mu_base_i = 2 + i/N
    r1_max: float = 0.3
    random_r1: bool = False
    estimator: str = "storey"
    lam: float = 0.5
    l: float = 0.5  # noqa: E741
    covariance: str = "independent"
    rho: float = 0.0
    block: int = 20
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(sorted(float(g) for g in self.grid)))
        if self.experiment_id not in range(1, 6):
            raise ConfigError(f"experiment must be 1..5, got {self.experiment_id}")
        if self.grid_param not in ("n", "mu_base", "rho"):
            raise ConfigError(f"unknown grid parameter {self.grid_param!r}")
        if not self.grid:
            raise ConfigError("grid must be nonempty")
        if self.trials < 1 or self.nodes < 1:
            raise ConfigError("trials and nodes must be >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError("alpha must lie in (0, 1)")
        if self.estimator not in ("storey", "spacing"):
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.covariance not in ("independent", "ar1", "block"):
            raise ConfigError(f"unknown covariance {self.covariance!r}")
        if not (0.0 <= self.r1_max <= 1.0):
            raise ConfigError("r1_max must lie in [0, 1]")
        try:
            self.estimator_config()
            for g in self.grid:
                self.point(g)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def estimator_config(self):
        if self.estimator == "storey":
            return StoreyConfig(self.lam)
        return SpacingConfig(self.l)

    def point(self, value):
        """Resolved (n, mu_base, rho) at one grid value."""
        n, mu, rho = self.n, self.mu_base, self.rho
        if self.grid_param == "n":
            n = int(round(value))
        elif self.grid_param == "mu_base":
            mu = value
        else:
            rho = value
        if n < 1:
            raise ConfigError("n must be >= 1")
        if not (0.0 <= rho < 1.0):
            raise ConfigError("rho must lie in [0, 1)")
        if not self.heterogeneous_mu and not mu > self.half_width:
            raise ConfigError("mu_base must exceed the half width")
        return n, mu, rho


_DEFAULTS = {
    1: dict(grid_param="n", grid=(1e2, 1e3, 1e4, 1e5), size_rule="uniform"),
    2: dict(grid_param="n", grid=(1e2, 1e3, 1e4, 1e5, 1e6), size_rule="power"),
    3: dict(grid_param="mu_base", grid=(2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0), n=10_000,
            size_rule="power"),
    4: dict(grid_param="n", grid=(1e3, 1e4, 1e5, 1e6), size_rule="power", heterogeneous_mu=True),
    5: dict(grid_param="rho", grid=(0.0, 0.2, 0.4, 0.6, 0.8), n=1_000, size_rule="power",
            covariance="ar1"),
}


def default_config(experiment_id, **overrides):
    """The full-scale configuration of one experiment, with overrides."""
    if experiment_id not in _DEFAULTS:
        raise ConfigError(f"experiment must be 1..5, got {experiment_id}")
    kw = dict(_DEFAULTS[experiment_id])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(experiment_id=experiment_id, **kw)


@dataclass(frozen=True)
class MethodResult:
    experiment: int
    method: str
    grid_param: str
    grid_value: float
    fdr: float
    fdr_se: float
    power: float
    power_se: float
    trials: int
    seed: int
    mean_rejections: float = 0.0
    alpha_summary: dict = field(default_factory=dict)


def _node_specs(cfg, value, trial, policy):
    n, mu, rho = cfg.point(value)
    sizes = node_sizes(n, cfg.nodes, cfg.size_rule)
    if cfg.covariance == "independent":
        dep = Dependence()
    else:
        dep = Dependence(cfg.covariance, rho, cfg.block)
    out = []
    for i, m in enumerate(sizes, start=1):
        rng = policy.stream(trial, i)
        r1 = cfg.r1_max * rng.random() if cfg.random_r1 else cfg.r1_max * (i / cfg.nodes)
        mu_i = 2.0 + i / cfg.nodes if cfg.heterogeneous_mu else mu
        alt = AlternativeModel(mu_i, cfg.half_width)
        out.append((NodeGenSpec(m, alt_count(r1, m), alt, dep), rng))
    return out


def _network_metrics(batches, results):
    R = V = m1 = 0
    for b, r in zip(batches, results):
        t = trial_metrics(b, r)
        R += t.R
        V += t.V
        m1 += b.m1
    return TrialMetrics(R=R, V=V, fdp=V / max(R, 1), tdp=(R - V) / max(m1, 1))


def run_trial(cfg, value, trial):
    """One seeded trial at one grid value; returns ({method: TrialMetrics}, alphas)."""
    policy = SeedPolicy(cfg.seed)
    batches = [gen_node_batch(spec, rng) for spec, rng in _node_specs(cfg, value, trial, policy)]
    est = cfg.estimator_config()
    nodes = [NodeState(i, b, est) for i, b in enumerate(batches, start=1)]

    dist = run_round(nodes, cfg.alpha, StarTransport())
    alphas = np.array([nd.alpha_i for nd in nodes])

    m = sum(b.m for b in batches)
    local = [local_bh(nd, cfg.alpha * nd.batch.m / m) for nd in nodes]

    pooled_p = np.concatenate([b.pvalues for b in batches])
    pooled_null = np.concatenate([b.is_null for b in batches])
    central = bh_procedure(pooled_p, cfg.alpha)
    R = central.k_hat
    V = int(np.count_nonzero(pooled_null[central.rejected]))
    m1 = int(pooled_null.size - np.count_nonzero(pooled_null))

    metrics = {
        "distributed": _network_metrics(batches, [dist[nd.node_id] for nd in nodes]),
        "central": TrialMetrics(R=R, V=V, fdp=V / max(R, 1), tdp=(R - V) / max(m1, 1)),
        "local_only": _network_metrics(batches, local),
    }
    return metrics, alphas


def _trial_job(args):
    return run_trial(*args)


def _se(x):
    return float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0


def run_grid_point(cfg, value):
    jobs = [(cfg, value, t) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            outs = list(ex.map(_trial_job, jobs, chunksize=max(1, cfg.trials // (4 * cfg.workers))))
    else:
        outs = [_trial_job(j) for j in jobs]
    # outs is in trial-index order either way
    results = []
    all_alphas = np.concatenate([a for _, a in outs])
    for method in METHODS:
        fdp = np.array([o[0][method].fdp for o in outs])
        tdp = np.array([o[0][method].tdp for o in outs])
        rej = np.array([o[0][method].R for o in outs], dtype=float)
        summary = {}
        if method == "distributed":
            summary = {"mean": float(all_alphas.mean()), "min": float(all_alphas.min()),
                       "max": float(all_alphas.max())}
        results.append(MethodResult(
            experiment=cfg.experiment_id, method=method, grid_param=cfg.grid_param,
            grid_value=value, fdr=float(fdp.mean()), fdr_se=_se(fdp),
            power=float(tdp.mean()), power_se=_se(tdp), trials=cfg.trials, seed=cfg.seed,
            mean_rejections=float(rej.mean()), alpha_summary=summary,
        ))
    return results


def run_experiment(cfg):
    """All methods at every grid point, ordered by method then grid value."""
    out = []
    for value in cfg.grid:
        out.extend(run_grid_point(cfg, value))
    return sort_results(out)


def sort_results(results):
    return sorted(results, key=lambda r: (METHODS.index(r.method), r.grid_value))


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_csv(results, path):
    results = list(results)
    if not results:
        raise ValueError("no results to write")
    rows = [[_fmt(getattr(r, "experiment")), r.method, r.grid_param, _fmt(r.grid_value),
             _fmt(r.fdr), _fmt(r.fdr_se), _fmt(r.power), _fmt(r.power_se),
             _fmt(r.trials), _fmt(r.seed)] for r in sort_results(results)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
    return path


def with_overrides(cfg, **kw):
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
