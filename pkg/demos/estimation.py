"""Recover edge functions from simulated data, and see what the data cannot pin down.

Run from the repository root:  python3 demos/estimation.py
"""

from pathlib import Path

import numpy as np

from netident import FunctionClassId, RankDeficient, load_network
from netident.estimator import EstimationProblem, default_horizon, design_excitations, fit_edges, recovery_error
from netident.generators import random_dag, random_network

HERE = Path(__file__).parent

# measuring the single sink of a small DAG is enough
dag = load_network(HERE / "networks" / "three_node_dag.net")
horizon = default_horizon(dag)
prob = EstimationProblem.from_network(dag, design_excitations(3, horizon, 60, seed=0), degree_cap=3)
fit = fit_edges(prob, [3])
print(f"three-node DAG, measuring node 3, horizon {horizon}: recovery error {recovery_error(dag, fit.functions):.1e}")
for edge, f in fit.functions.items():
    print(f"  f{edge} = {f}")

# random DAGs: sinks in, edge functions out
rng = np.random.default_rng(1)
worst = 0.0
for t in range(10):
    g = random_dag(int(rng.integers(3, 7)), rng)
    net = random_network(g, rng, kind="znl")
    sinks = sorted(v for v in g.nodes if not g.out_neighbors(v))
    h = default_horizon(net)
    p = EstimationProblem.from_network(net, design_excitations(g.node_count, h, 60, seed=t), degree_cap=3)
    worst = max(worst, recovery_error(net, fit_edges(p, sinks).functions))
print(f"\n10 random DAGs measured at their sinks: worst recovery error {worst:.1e}")

# the bridge: the hub only sees a1 f21 + a2 f31, so the branches trade freely
bridge = load_network(HERE / "networks" / "bridge.net")
prob = EstimationProblem.from_network(bridge, design_excitations(4, default_horizon(bridge), 60), 3, FunctionClassId.Z)
try:
    fit_edges(prob, [4])
except RankDeficient as exc:
    print(f"\nbridge measured at the hub only: {len(exc.directions)} undetermined directions")
    for d in exc.directions:
        print("  " + "  ".join(f"{w:+.3f}*[{e[0]}<-{e[1]} x^{m[0]}]" for (e, m), w in d.items()))
    print(f"  one exact fit still reproduces the data: max residual {exc.report.max_residual:.1e}")
