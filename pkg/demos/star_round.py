"""
One protocol round over a star network
======================================

Each node sends its size and null-fraction estimate, the center answers
with one number, and each node runs BH at its own calibrated level.
"""

import numpy as np
from distbh import NodeState, StoreyConfig, StarTransport, bh_procedure, run_round
from distbh.datagen import AlternativeModel, Dependence, NodeGenSpec, gen_node_batch
from distbh.protocol import encode_report, make_report

rng = np.random.default_rng(2)
nodes = []
for i, (m, r0) in enumerate([(200, 0.9), (5_000, 0.7), (40_000, 0.95)], start=1):
    spec = NodeGenSpec(m, int((1 - r0) * m), AlternativeModel(3.0), Dependence("independent"))
    nodes.append(NodeState(i, gen_node_batch(spec, rng), StoreyConfig(0.5)))

net = StarTransport(seed=0)
out = run_round(nodes, 0.2, net)
for n in nodes:
    print(f"node {n.node_id}: m={n.batch.m:>5}  alpha_i={n.alpha_i:.4f}  rejected={out[n.node_id].k_hat}")

# traffic does not grow with the number of p-values
print("messages:", net.messages, " bytes:", net.bytes)
print(encode_report(make_report(nodes[0])).hex())

# pooled BH for comparison; it needs every p-value at one place
pooled = np.concatenate([n.batch.pvalues for n in nodes])
print("central rejections:", bh_procedure(pooled, 0.2).k_hat,
      " distributed:", sum(r.k_hat for r in out.values()))
