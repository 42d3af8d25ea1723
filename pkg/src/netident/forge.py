"""Constructive unidentifiability: pairs of networks with equal measured outputs."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadNode,
    HorizonTooShort,
    MissingCommonSource,
    NotCoInNeighbors,
    NotLinearHubEdges,
    WrongTopology,
    ZeroGamma,
)
from .graph import TopologyClass, classify_topology, sinks, sources
from .network import Network, validate
from .poly import EdgeFunction, Univariate, precompose_shift, shift_add
from .simulate import ExcitationPlan, settling_depth, simulate_array


class Construction(enum.Enum):
    GAMMA_SPLIT = "gamma-split"
    ARBORESCENCE_SHIFT = "shift"
    LINEAR_SUPERPOSITION = "linear"


@dataclass(frozen=True)
class ForgedPair:
    original: Network
    alternative: Network
    measured: frozenset[int]
    construction: Construction | None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.original.graph != self.alternative.graph:
            raise ValueError("forged networks must share a digraph")

    def changed_edges(self) -> list:
        return [e for e, f in self.original.functions.items() if self.alternative[e] != f]


def forge_gamma_split(net: Network, i: int, p: int, q: int, gamma: float) -> ForgedPair:
    """Add ``gamma`` on edge ``(i, p)`` and remove it on ``(i, q)``."""
    validate(net)
    net.graph.check_node(i)
    preds = net.graph.in_neighbors(i)
    if p == q or p not in preds or q not in preds:
        raise NotCoInNeighbors(f"nodes {p} and {q} are not two distinct in-neighbours of {i}")
    if gamma == 0:
        raise ZeroGamma("gamma must be nonzero")
    alt = net.replace({(i, p): shift_add(net[(i, p)], gamma), (i, q): shift_add(net[(i, q)], -gamma)})
    return ForgedPair(net, alt, frozenset(net.graph.nodes), Construction.GAMMA_SPLIT,
                      {"i": i, "p": p, "q": q, "gamma": float(gamma)})


def forge_arborescence_shift(net: Network, i: int, gamma: float) -> ForgedPair:
    """Offset node ``i`` by ``gamma`` and undo the offset on every outgoing edge."""
    validate(net)
    g = net.graph
    if not classify_topology(g).within(TopologyClass.ARBORESCENCE):
        raise WrongTopology("shift construction needs an arborescence")
    g.check_node(i)
    if i in sources(g) or i in sinks(g):
        raise BadNode(f"node {i} must be neither the source nor a sink")
    if gamma == 0:
        raise ZeroGamma("gamma must be nonzero")
    (parent,) = g.in_neighbors(i)
    updates = {(i, parent): shift_add(net[(i, parent)], gamma)}
    for child in g.out_neighbors(i):
        updates[(child, i)] = precompose_shift(net[(child, i)], gamma)
    measured = frozenset(g.nodes) - {i}
    return ForgedPair(net, net.replace(updates), measured, Construction.ARBORESCENCE_SHIFT,
                      {"i": i, "gamma": float(gamma)})


def _linear_coefficient(f: EdgeFunction) -> float | None:
    if f.memory == 1 and len(f.terms) == 1 and f.terms[0][0] == (1,):
        return f.terms[0][1]
    return None


def forge_linear_superposition(
    net: Network, hub: int, p: int, q: int, a1: float, a2: float, delta: Univariate
) -> ForgedPair:
    """Trade ``delta`` between the two branches feeding a hub through linear edges.

    With ``f_hub,p = a1 x`` and ``f_hub,q = a2 x`` the hub only sees
    ``a1 f_p,s + a2 f_q,s`` of the shared source ``s``, so adding
    ``(a2/a1) delta`` to one branch and ``-delta`` to the other is invisible.
    """
    validate(net)
    g = net.graph
    g.check_node(hub)
    if not delta:
        raise ValueError("delta must be a nonzero polynomial")
    if delta.coeffs.get(0, 0.0) != 0.0:
        raise ValueError("delta must vanish at zero")
    if a1 == 0 or a2 == 0:
        raise NotLinearHubEdges("hub coefficients must be nonzero")
    for src, a in ((p, a1), (q, a2)):
        if not g.has_edge(hub, src) or _linear_coefficient(net[(hub, src)]) != a:
            raise NotLinearHubEdges(f"edge ({hub}, {src}) is not the linear map {a}*x")
    common = [s for s in g.in_neighbors(p) if s in g.in_neighbors(q)
              and net[(p, s)].memory == 1 and net[(q, s)].memory == 1]
    if not common:
        raise MissingCommonSource(f"nodes {p} and {q} share no memory-1 in-neighbour")
    s = common[0]
    # p and q must reach the hub only through the linear edges
    for node in (p, q):
        if g.out_neighbors(node) != (hub,):
            raise NotLinearHubEdges(f"node {node} feeds more than the hub")
    scaled = {k: (a2 / a1) * c for k, c in delta.coeffs.items()}
    fp = _add_univariate(net[(p, s)], scaled)
    fq = _add_univariate(net[(q, s)], {k: -c for k, c in delta.coeffs.items()})
    alt = net.replace({(p, s): fp, (q, s): fq})
    return ForgedPair(net, alt, frozenset({hub}), Construction.LINEAR_SUPERPOSITION,
                      {"hub": hub, "p": p, "q": q, "source": s, "a1": a1, "a2": a2,
                       "delta": dict(delta.coeffs)})


def _add_univariate(f: EdgeFunction, coeffs: dict[int, float]) -> EdgeFunction:
    terms = f.coeffs
    for power, c in coeffs.items():
        terms[(power,)] = terms.get((power,), 0.0) + c
    return EdgeFunction(1, terms)


# -- randomized verification --------------------------------------------------


@dataclass(frozen=True)
class Witness:
    plan: ExcitationPlan
    node: int
    k: int
    discrepancy: float


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    trials: int
    max_discrepancy: float
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.passed


def verify_indistinguishable(
    pair: ForgedPair, trials: int = 100, horizon: int | None = None, seed: int = 0, tol: float = 1e-12
) -> VerifyResult:
    """Simulate both networks on ``trials`` random plans and compare measured outputs.

    Acyclic networks are also driven before time 0 (back to their settling
    depth) so the comparison covers steady behaviour, not only start-up.
    """
    report = validate(pair.original)
    if horizon is None:
        horizon = report.k_min_bar + 1
    if horizon < report.k_min_bar + 1:
        raise HorizonTooShort(f"horizon {horizon} < k_min_bar + 1 = {report.k_min_bar + 1}")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    if trials == 0:
        warnings.warn("no trials requested; the pass is vacuous", stacklevel=2)
        return VerifyResult(True, 0, 0.0)
    n = pair.original.node_count
    pre = settling_depth(pair.original) + 1 if pair.original.graph.is_acyclic() else 0
    inputs = np.stack([
        np.random.default_rng([seed, t]).uniform(-1.0, 1.0, (n, pre + horizon)) for t in range(trials)
    ])
    ya = simulate_array(pair.original, inputs, pre)
    yb = simulate_array(pair.alternative, inputs, pre)
    rows = sorted(v - 1 for v in pair.measured)
    diff = np.abs(ya[:, rows, :] - yb[:, rows, :])
    worst = float(diff.max()) if diff.size else 0.0
    if worst <= tol:
        return VerifyResult(True, trials, worst)
    bad = int(np.argmax(diff.reshape(trials, -1).max(axis=1) > tol))
    r, c = np.unravel_index(int(np.argmax(diff[bad])), diff[bad].shape)
    witness = Witness(ExcitationPlan(inputs[bad], pre), rows[r] + 1, int(c) + 1, float(diff[bad, r, c]))
    return VerifyResult(False, trials, worst, witness)
