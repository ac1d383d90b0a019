"""Communication-efficient distributed Benjamini-Hochberg testing over a star network."""

from .core import (BhResult, PValueBatch, TrialMetrics, aggregate_metrics, bh_procedure,
                   bonferroni, trial_metrics)
from .datagen import AlternativeModel, Dependence, NodeGenSpec, SeedPolicy, gen_node_batch
from .estimators import SpacingConfig, StoreyConfig, empirical_cdf, spacing_estimate, storey_estimate
from .oracle import alt_cdf, beta, limit_fdr_power, storey_limit, tau_star
from .protocol import (CenterBroadcast, NodeReport, NodeState, StarTransport, aggregate, calibrate,
                       make_report, run_round)

__version__ = "0.1.0"
