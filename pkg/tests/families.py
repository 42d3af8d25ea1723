"""Random network families and helpers for the recovery experiments."""

from __future__ import annotations

import numpy as np

from netident import FunctionClassId, Network, required_measurements, unfold
from netident.estimator import EstimationProblem, design_excitations, fit_edges, plans_needed
from netident.generators import random_digraph, random_network
from netident.poly import separate


def covered_components(net: Network, measured, k: int) -> tuple[set, set]:
    """Separable components seen by the unfolded digraphs of ``measured`` at ``k``, and all nonzero ones.

    Components are ``(to, from, delay)`` triples.
    """
    seen = set()
    for i in measured:
        u = unfold(net, i, k)
        seen |= {(dst[0], src[0], src[1] - dst[1]) for dst, src in u.edges}
    need = {(e[0], e[1], d) for e, f in net.functions.items() for d, c in separate(f).components.items() if c}
    return seen, need


def cyclic_family(count: int, seed: int, max_memory: int):
    """Separable nonlinear networks on random digraphs with at least one cycle, up to 6 nodes."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, 7))
        g = random_digraph(n, rng, cyclic=True)
        yield random_network(g, rng, kind="separable", max_memory=max_memory, max_degree=3)


def fit_cyclic(net: Network, horizon: int, seed: int):
    """Fit from one node per sink component using data up to ``horizon``."""
    req = required_measurements(net, FunctionClassId.ZNL_SEPARABLE)
    probe = EstimationProblem.from_network(net, [], 3, FunctionClassId.ZNL_SEPARABLE)
    count = max(30, plans_needed(probe.size(), horizon, len(req.nodes)))
    plans = design_excitations(net.node_count, horizon, count, seed)
    prob = EstimationProblem.from_network(net, plans, 3, FunctionClassId.ZNL_SEPARABLE)
    return req.nodes, fit_edges(prob, req.nodes)
