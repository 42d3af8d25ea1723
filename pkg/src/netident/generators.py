"""Random digraphs and networks for property tests and demos.

Coefficients are scaled so that with inputs in [-1, 1] every output stays
within [-2, 2]: per node, the sum over incoming terms of ``|c| * 2**deg``
is at most 1.
"""

from __future__ import annotations

import numpy as np

from .graph import Digraph, shortest_distances
from .network import Network
from .poly import EdgeFunction


def _connected_skeleton(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Random spanning tree on ``1..n`` as unordered pairs ``(a, b)`` with ``a < b``."""
    order = rng.permutation(n) + 1
    pairs = []
    for idx in range(1, n):
        other = order[rng.integers(0, idx)]
        a, b = sorted((int(order[idx]), int(other)))
        pairs.append((a, b))
    return pairs


def random_dag(n: int, rng: np.random.Generator, extra: float = 0.3) -> Digraph:
    """Weakly connected DAG; edges go from lower to higher label in a hidden order."""
    rank = rng.permutation(n) + 1
    pos = {v: r for v, r in zip(range(1, n + 1), rank)}
    pairs = set(_connected_skeleton(n, rng))
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < extra:
                pairs.add((a, b))
    edges = set()
    for a, b in pairs:
        lo, hi = (a, b) if pos[a] < pos[b] else (b, a)
        edges.add((hi, lo))
    return Digraph(n, edges)


def random_arborescence(n: int, rng: np.random.Generator) -> Digraph:
    order = rng.permutation(n) + 1
    edges = [(int(order[idx]), int(order[rng.integers(0, idx)])) for idx in range(1, n)]
    return Digraph(n, edges)


def random_tree(n: int, rng: np.random.Generator) -> Digraph:
    """Oriented spanning tree with random edge directions."""
    edges = []
    for a, b in _connected_skeleton(n, rng):
        edges.append((a, b) if rng.random() < 0.5 else (b, a))
    return Digraph(n, edges)


def random_digraph(n: int, rng: np.random.Generator, density: float = 0.3, cyclic: bool = False) -> Digraph:
    """Weakly connected digraph; with ``cyclic`` at least one directed cycle is present."""
    edges = set()
    for a, b in _connected_skeleton(n, rng):
        edges.add((a, b) if rng.random() < 0.5 else (b, a))
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b and (a, b) not in edges and (b, a) not in edges and rng.random() < density:
                edges.add((a, b))
    g = Digraph(n, edges)
    if cyclic and g.is_acyclic():
        # close a cycle with an edge from the far end of a longest shortest path back to its start
        best = None
        for a in g.nodes:
            for b, dist in shortest_distances(g, a).items():
                if dist >= 1 and (best is None or dist > best[2]):
                    best = (a, b, dist)
        a, b, _ = best
        edges.add((a, b))
        g = Digraph(n, edges)
    return g


def _random_terms(memory: int, degree: int, rng: np.random.Generator, kind: str) -> dict:
    """Random exponent -> coefficient map satisfying the requested class."""
    while True:
        terms = {}
        count = int(rng.integers(1, 4))
        for _ in range(count):
            if kind == "separable":
                d = int(rng.integers(0, memory))
                p = int(rng.integers(2, degree + 1))
                exps = [0] * memory
                exps[d] = p
            else:
                low = 2 if kind == "znl" else 1
                total = int(rng.integers(low, degree + 1))
                exps = [0] * memory
                for _ in range(total):
                    exps[int(rng.integers(0, memory))] += 1
            terms[tuple(exps)] = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.0))
        if kind == "z" and rng.random() < 0.5:
            exps = [0] * memory
            exps[int(rng.integers(0, memory))] = 1
            terms[tuple(exps)] = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.0))
        if not any(e[memory - 1] > 0 for e in terms):
            continue
        if kind in ("znl", "separable") and max(sum(e) for e in terms) < 2:
            continue
        return terms


def random_network(
    g: Digraph,
    rng: np.random.Generator,
    *,
    kind: str = "znl",
    max_memory: int = 2,
    max_degree: int = 3,
) -> Network:
    """Random polynomial edge functions on ``g``.

    ``kind`` is one of ``"z"`` (vanishing at zero, linear terms allowed),
    ``"znl"`` (vanishing at zero, every term of degree >= 2), ``"separable"``
    (no cross-delay terms, every component of degree >= 2) or ``"all"``
    (like ``"z"`` plus a constant term).
    """
    raw = {}
    for edge in g.sorted_edges():
        memory = int(rng.integers(1, max_memory + 1))
        terms = _random_terms(memory, max_degree, rng, "znl" if kind == "all" else kind)
        if kind == "all":
            terms[(0,) * memory] = float(rng.uniform(-1.0, 1.0))
        raw[edge] = (memory, terms)
    functions = {}
    for v in g.nodes:
        incoming = [e for e in raw if e[0] == v]
        budget = sum(abs(c) * 2.0 ** sum(exps) for e in incoming for exps, c in raw[e][1].items())
        scale = 1.0 / budget if budget > 1.0 else 1.0
        for e in incoming:
            memory, terms = raw[e]
            functions[e] = EdgeFunction(memory, {k: c * scale for k, c in terms.items()})
    return Network(g, functions)
