"""
BH versus Bonferroni on one labelled batch
==========================================
"""

import numpy as np
from distbh import PValueBatch, bh_procedure, bonferroni, trial_metrics
from distbh.datagen import AlternativeModel, gen_mixture_batch

rng = np.random.default_rng(0)

# 10000 tests, 20% of them carry a signal with mean around 3
batch = gen_mixture_batch(10_000, 0.8, AlternativeModel(3.0, half_width=0.0, symmetric=False), rng)
print("m =", batch.m, " m1 =", batch.m1)

res = bh_procedure(batch.pvalues, 0.2)
print("BH rejections:", res.k_hat, " threshold:", res.threshold)
print(trial_metrics(batch, res))

# Bonferroni controls the familywise error, so it is far more timid
bon = bonferroni(batch.pvalues, 0.2)
print("Bonferroni rejections:", bon.size)

# ties on the cut are all rejected, whatever the input order
p = np.array([0.3, 0.04, 0.04, 0.5])
print(bh_procedure(p, 0.2).rejected, bh_procedure(p[::-1], 0.2).rejected)

# labels are needed only for scoring
toy = PValueBatch([0.001, 0.01, 0.6], [False, True, True])
print(trial_metrics(toy, bh_procedure(toy.pvalues, 0.2)))
