"""A network: a digraph plus one polynomial edge function per edge."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .errors import ExtraEdgeFunction, MissingEdgeFunction, NotSeparable, ZeroMemory
from .graph import Digraph, Edge, diameter
from .poly import EdgeFunction, classify, separate


@dataclass(frozen=True)
class Network:
    """Edge ``(i, j)`` carries ``functions[(i, j)]``, driven by node ``j``'s past outputs."""

    graph: Digraph
    functions: Mapping[Edge, EdgeFunction]

    def __init__(self, graph: Digraph, functions: Mapping[Edge, EdgeFunction]):
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "functions", MappingProxyType(dict(sorted(functions.items()))))

    @classmethod
    def from_functions(cls, node_count: int, functions: Mapping[Edge, EdgeFunction]) -> Network:
        return cls(Digraph(node_count, functions.keys()), functions)

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def __getitem__(self, edge: Edge) -> EdgeFunction:
        return self.functions[edge]

    def replace(self, updates: Mapping[Edge, EdgeFunction]) -> Network:
        """New network with some edge functions swapped; topology unchanged."""
        for edge in updates:
            if edge not in self.functions:
                raise ExtraEdgeFunction(f"edge {edge} is not in the network")
        merged = dict(self.functions)
        merged.update(updates)
        return Network(self.graph, merged)

    def __eq__(self, other):
        return (
            isinstance(other, Network)
            and self.graph == other.graph
            and dict(self.functions) == dict(other.functions)
        )

    def __hash__(self):
        return hash((self.graph, tuple(self.functions.items())))

    def __reduce__(self):
        return (Network, (self.graph, dict(self.functions)))


@dataclass(frozen=True)
class NetworkClassReport:
    all_in_f_z: bool
    all_in_f_znl: bool
    all_separable_znl: bool
    m_max: int
    diameter: int
    k_min_bar: int


def validate(net: Network) -> NetworkClassReport:
    g = net.graph
    missing = g.edges - set(net.functions)
    if missing:
        raise MissingEdgeFunction(f"no function for edges {sorted(missing)}")
    extra = set(net.functions) - g.edges
    if extra:
        raise ExtraEdgeFunction(f"functions for non-edges {sorted(extra)}")
    for edge, f in net.functions.items():
        if f.memory < 1:
            raise ZeroMemory(f"edge {edge} has memory < 1")
    flags = [classify(f) for f in net.functions.values()]
    separable_znl = True
    for f in net.functions.values():
        try:
            if not separate(f).all_znl():
                separable_znl = False
        except NotSeparable:
            separable_znl = False
    m_max = max((f.memory for f in net.functions.values()), default=1)
    diam = diameter(g)
    return NetworkClassReport(
        all_in_f_z=all(fl.in_f_z for fl in flags),
        all_in_f_znl=all(fl.in_f_znl for fl in flags),
        all_separable_znl=separable_znl,
        m_max=m_max,
        diameter=diam,
        k_min_bar=m_max + diam,
    )
