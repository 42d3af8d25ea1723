"""Directed graphs and the topology analysis the identifiability rules need.

Edges use the ``(to, from)`` convention throughout: ``(i, j)`` is the edge
from node ``j`` into node ``i``.  Nodes are the integers ``1..n``.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import IsSource, NotAcyclic, NotWeaklyConnected, UnknownNode

Edge = tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    """Simple digraph on nodes ``1..node_count`` with ``(to, from)`` edges."""

    node_count: int
    edges: frozenset[Edge]

    def __init__(self, node_count: int, edges: Iterable[Edge] = ()):
        if node_count < 1:
            raise ValueError("a digraph needs at least one node")
        edge_list = [(int(a), int(b)) for a, b in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise ValueError("duplicate edge")
        for to, frm in edge_set:
            if to == frm:
                raise ValueError(f"self-loop on node {to}")
            if not (1 <= to <= node_count and 1 <= frm <= node_count):
                raise UnknownNode(f"edge {(to, frm)} outside 1..{node_count}")
        object.__setattr__(self, "node_count", int(node_count))
        object.__setattr__(self, "edges", edge_set)

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @cached_property
    def _in(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for to, frm in self.edges:
            adj[to].append(frm)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def _out(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for to, frm in self.edges:
            adj[frm].append(to)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def check_node(self, v: int) -> None:
        if not (1 <= v <= self.node_count):
            raise UnknownNode(f"node {v} not in 1..{self.node_count}")

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        self.check_node(v)
        return self._in[v]

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        self.check_node(v)
        return self._out[v]

    def has_edge(self, to: int, frm: int) -> bool:
        return (to, frm) in self.edges

    def is_weakly_connected(self) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            v = stack.pop()
            for w in self._in[v] + self._out[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.node_count

    def topological_order(self) -> list[int] | None:
        """Kahn order (smallest ready label first), or None when cyclic."""
        indeg = {v: len(self._in[v]) for v in self.nodes}
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in self._out[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
            ready.sort()
        return order if len(order) == self.node_count else None

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def reachable_from(self, v: int) -> set[int]:
        """Nodes reachable from ``v`` by a directed path (``v`` included)."""
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in self._out[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def ancestors(self, v: int) -> set[int]:
        """Nodes with a directed path to ``v`` (``v`` included)."""
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in self._in[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        for v in self.nodes:
            lines.append(f'  "{v}";')
        for to, frm in self.sorted_edges():
            lines.append(f'  "{frm}" -> "{to}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _require_weak(g: Digraph) -> None:
    if not g.is_weakly_connected():
        raise NotWeaklyConnected("digraph is not weakly connected")


def _require_acyclic(g: Digraph) -> list[int]:
    order = g.topological_order()
    if order is None:
        raise NotAcyclic("digraph has a directed cycle")
    return order


# -- strongly connected components -------------------------------------------


@dataclass(frozen=True)
class Condensation:
    """Strongly connected components and the acyclic quotient digraph.

    Components are numbered from 1 in order of their smallest member, so
    ``components[c - 1]`` is component ``c`` and node ``c`` of ``quotient``.
    """

    components: tuple[frozenset[int], ...]
    quotient: Digraph
    component_of: dict[int, int]

    def sink_components(self) -> list[int]:
        return [c for c in self.quotient.nodes if not self.quotient.out_neighbors(c)]

    def label(self, c: int) -> str:
        members = ",".join(str(v) for v in sorted(self.components[c - 1]))
        return f"C{c}{{{members}}}"

    def to_dot(self, name: str = "C") -> str:
        lines = [f"digraph {name} {{"]
        for c in self.quotient.nodes:
            lines.append(f'  "{self.label(c)}";')
        for to, frm in self.quotient.sorted_edges():
            lines.append(f'  "{self.label(frm)}" -> "{self.label(to)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _tarjan(g: Digraph) -> list[list[int]]:
    """Iterative Tarjan; visits roots and successors in increasing label order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    found: list[list[int]] = []
    counter = 0
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(g.out_neighbors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, successors = work[-1]
            advanced = False
            for w in successors:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.out_neighbors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                found.append(comp)
    return found


def scc(g: Digraph) -> Condensation:
    comps = sorted((frozenset(c) for c in _tarjan(g)), key=min)
    component_of = {v: ci for ci, comp in enumerate(comps, start=1) for v in comp}
    qedges = {
        (component_of[to], component_of[frm])
        for to, frm in g.edges
        if component_of[to] != component_of[frm]
    }
    return Condensation(tuple(comps), Digraph(len(comps), qedges), component_of)


# -- degree based queries -----------------------------------------------------


def sinks(g: Digraph) -> set[int]:
    return {v for v in g.nodes if not g.out_neighbors(v)}


def sources(g: Digraph) -> set[int]:
    return {v for v in g.nodes if not g.in_neighbors(v)}


# -- topology classes ---------------------------------------------------------


class TopologyClass(enum.IntEnum):
    """Ordered from most to least specific."""

    PATH_GRAPH = 0
    ARBORESCENCE = 1
    TREE = 2
    DAG = 3
    GENERAL = 4

    def within(self, other: TopologyClass) -> bool:
        """True when every graph of this class also belongs to ``other``."""
        return self <= other


def classify_topology(g: Digraph) -> TopologyClass:
    _require_weak(g)
    if not g.is_acyclic():
        return TopologyClass.GENERAL
    # weakly connected: the underlying graph is a tree iff |E| = n - 1
    if len(g.edges) != g.node_count - 1:
        return TopologyClass.DAG
    if any(len(g.in_neighbors(v)) > 1 for v in g.nodes):
        return TopologyClass.TREE
    if all(len(g.out_neighbors(v)) <= 1 for v in g.nodes):
        return TopologyClass.PATH_GRAPH
    return TopologyClass.ARBORESCENCE


# -- paths ---------------------------------------------------------------------


def count_paths(g: Digraph, frm: int, to: int, cap: int = 2) -> int:
    """Number of directed paths ``frm -> to``, saturated at ``cap``.

    A path of length zero (``frm == to``) counts as one.
    """
    if cap < 2:
        raise ValueError("cap must be at least 2")
    g.check_node(frm)
    g.check_node(to)
    order = _require_acyclic(g)
    counts = dict.fromkeys(g.nodes, 0)
    counts[frm] = 1
    for v in order[order.index(frm):]:
        if v != frm:
            counts[v] = min(cap, sum(counts[w] for w in g.in_neighbors(v)))
        if v == to:
            break
    return counts[to]


def unique_path_inneighbor(g: Digraph, i: int) -> int:
    """Smallest in-neighbour of ``i`` whose only path to ``i`` is the edge."""
    _require_acyclic(g)
    preds = g.in_neighbors(i)
    if not preds:
        raise IsSource(f"node {i} is a source")
    for j in preds:
        if count_paths(g, j, i) == 1:
            return j
    # unreachable for a DAG; kept so a violated invariant is loud
    raise AssertionError(f"no unique-path in-neighbour for node {i}")


def shortest_distances(g: Digraph, frm: int) -> dict[int, int]:
    dist = {frm: 0}
    queue = deque([frm])
    while queue:
        v = queue.popleft()
        for w in g.out_neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def diameter(g: Digraph) -> int:
    """Longest shortest directed path over ordered pairs that are connected.

    Pairs without a directed path are ignored, so for graphs that are not
    strongly connected the value is a lower bound of any finite notion of
    diameter.
    """
    _require_weak(g)
    return max(max(shortest_distances(g, v).values()) for v in g.nodes)
