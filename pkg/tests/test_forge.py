import warnings

import numpy as np
import pytest

from fixtures import SQ, bridge_network, example_dag
from netident import (
    EdgeFunction,
    ExcitationPlan,
    FunctionClassId,
    Network,
    Univariate,
    Verdict,
    forge_arborescence_shift,
    forge_gamma_split,
    forge_linear_superposition,
    is_identifiable,
    simulate,
    traces_indistinguishable,
    verify_indistinguishable,
)
from netident.errors import (
    BadNode,
    HorizonTooShort,
    MissingCommonSource,
    NotCoInNeighbors,
    NotLinearHubEdges,
    WrongTopology,
    ZeroGamma,
)
from netident.forge import ForgedPair
from netident.generators import random_arborescence, random_dag, random_digraph, random_network


def star() -> Network:
    return Network.from_functions(3, {(3, 1): SQ, (3, 2): EdgeFunction(1, {(3,): 0.5})})


def test_gamma_split_parallel_edges():
    pair = forge_gamma_split(star(), 3, 1, 2, 1.0)
    assert pair.changed_edges() == [(3, 1), (3, 2)]
    plan = ExcitationPlan(np.random.default_rng(0).uniform(-1, 1, (3, 6)))
    a, b = simulate(pair.original, plan), simulate(pair.alternative, plan)
    assert traces_indistinguishable(a, b, [1, 2, 3], tol=1e-12)
    assert verify_indistinguishable(pair).passed


def test_gamma_split_preconditions():
    with pytest.raises(NotCoInNeighbors):
        forge_gamma_split(star(), 3, 1, 1, 1.0)
    with pytest.raises(NotCoInNeighbors):
        forge_gamma_split(example_dag(), 2, 1, 3, 1.0)
    with pytest.raises(ZeroGamma):
        forge_gamma_split(star(), 3, 1, 2, 0.0)


def test_gamma_split_random():
    rng = np.random.default_rng(1)
    done = 0
    while done < 30:
        n = int(rng.integers(3, 8))
        g = random_digraph(n, rng, cyclic=bool(done % 2))
        crowded = [v for v in g.nodes if len(g.in_neighbors(v)) >= 2]
        if not crowded:
            continue
        net = random_network(g, rng, kind="all")
        i = int(crowded[0])
        p, q = g.in_neighbors(i)[:2]
        gamma = float(rng.uniform(-2, 2)) or 1.0
        assert verify_indistinguishable(forge_gamma_split(net, i, p, q, gamma), trials=20, seed=done).passed
        done += 1


def test_shift_chain():
    chain = Network.from_functions(3, {(2, 1): SQ, (3, 2): EdgeFunction(1, {(2,): 0.5, (3,): 1.0})})
    pair = forge_arborescence_shift(chain, 2, 0.5)
    assert pair.measured == {1, 3}
    plan = ExcitationPlan(np.random.default_rng(2).uniform(-1, 1, (3, 6)))
    a, b = simulate(pair.original, plan), simulate(pair.alternative, plan)
    assert traces_indistinguishable(a, b, [3], tol=1e-12)
    assert np.allclose(b.values[1] - a.values[1], 0.5, atol=1e-12, rtol=0)


def test_shift_preconditions():
    with pytest.raises(WrongTopology):
        forge_arborescence_shift(example_dag(), 2, 1.0)
    arb = Network.from_functions(3, {(2, 1): SQ, (3, 2): SQ})
    with pytest.raises(BadNode):
        forge_arborescence_shift(arb, 1, 1.0)
    with pytest.raises(BadNode):
        forge_arborescence_shift(arb, 3, 1.0)
    with pytest.raises(ZeroGamma):
        forge_arborescence_shift(arb, 2, 0.0)


def test_shift_random_arborescences():
    rng = np.random.default_rng(3)
    for t in range(20):
        g = random_arborescence(int(rng.integers(3, 11)), rng)
        interior = [v for v in g.nodes if g.in_neighbors(v) and g.out_neighbors(v)]
        if not interior:
            continue
        net = random_network(g, rng, kind="z", max_memory=3)
        pair = forge_arborescence_shift(net, int(rng.choice(interior)), float(rng.uniform(0.1, 1.0)))
        assert verify_indistinguishable(pair, trials=20, seed=t).passed


def test_linear_superposition():
    pair = forge_linear_superposition(bridge_network(), 4, 2, 3, 0.4, -0.3, Univariate({2: 0.1, 3: 0.05}))
    assert pair.measured == {4}
    assert set(pair.changed_edges()) == {(2, 1), (3, 1)}
    assert verify_indistinguishable(pair, trials=100).passed
    # the change is visible at the branch nodes
    assert not verify_indistinguishable(ForgedPair(pair.original, pair.alternative, frozenset({2}), None)).passed


def test_linear_superposition_random():
    rng = np.random.default_rng(4)
    for t in range(20):
        a1, a2 = (float(rng.choice([-1, 1]) * rng.uniform(0.1, 1)) for _ in range(2))
        net = bridge_network(a1, a2)
        delta = Univariate({p: float(rng.uniform(-0.2, 0.2)) for p in range(1, 4)})
        pair = forge_linear_superposition(net, 4, 2, 3, a1, a2, delta)
        assert verify_indistinguishable(pair, trials=100, seed=t).passed


def test_linear_superposition_preconditions():
    net = bridge_network()
    d = Univariate({2: 0.1})
    with pytest.raises(NotLinearHubEdges):
        forge_linear_superposition(net, 4, 2, 3, 0.5, -0.3, d)
    nonlinear = net.replace({(4, 2): EdgeFunction(1, {(2,): 0.4})})
    with pytest.raises(NotLinearHubEdges):
        forge_linear_superposition(nonlinear, 4, 2, 3, 0.4, -0.3, d)
    split = Network.from_functions(5, {
        (2, 1): SQ, (3, 5): SQ,
        (4, 2): EdgeFunction(1, {(1,): 0.4}), (4, 3): EdgeFunction(1, {(1,): -0.3}),
    })
    with pytest.raises(MissingCommonSource):
        forge_linear_superposition(split, 4, 2, 3, 0.4, -0.3, d)
    with pytest.raises(ValueError):
        forge_linear_superposition(net, 4, 2, 3, 0.4, -0.3, Univariate({0: 1.0, 2: 0.1}))


def test_verify_detects_corruption():
    pair = forge_gamma_split(star(), 3, 1, 2, 1.0)
    f = pair.alternative[(3, 1)]
    coeffs = f.coeffs
    coeffs[(2,)] += 1e-3
    bad = ForgedPair(pair.original, pair.alternative.replace({(3, 1): EdgeFunction(1, coeffs)}),
                     pair.measured, pair.construction)
    res = verify_indistinguishable(bad)
    assert not res.passed and res.witness is not None
    assert res.witness.node == 3 and res.witness.discrepancy > 1e-12


def test_verify_trials_zero_and_horizon():
    pair = forge_gamma_split(star(), 3, 1, 2, 1.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = verify_indistinguishable(pair, trials=0)
    assert res.passed and res.trials == 0 and caught
    with pytest.raises(HorizonTooShort):
        verify_indistinguishable(pair, horizon=1)


def test_verify_is_deterministic():
    pair = forge_gamma_split(star(), 3, 1, 2, 1.0)
    a = verify_indistinguishable(pair, trials=10, seed=5)
    b = verify_indistinguishable(pair, trials=10, seed=5)
    assert a == b


def test_forged_pairs_never_contradict_the_analyzer():
    # a forged pair hides a change on some edge; the analyzer must not call that edge identifiable
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 40:
        n = int(rng.integers(3, 8))
        g = random_dag(n, rng)
        crowded = [v for v in g.nodes if len(g.in_neighbors(v)) >= 2]
        if not crowded:
            continue
        net = random_network(g, rng, kind="all")
        pair = forge_gamma_split(net, crowded[0], *g.in_neighbors(crowded[0])[:2], 0.5)
        rep = is_identifiable(net, FunctionClassId.ALL, pair.measured)
        for e in pair.changed_edges():
            assert rep.per_edge[e] is not Verdict.IDENTIFIABLE
        checked += 1
