"""Identifiability verdicts and required measurement sets.

Every verdict carries a short citation tag naming the rule that produced
it.  Where no rule applies the answer is ``UNKNOWN``; nothing is guessed.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Iterable

from .graph import Edge, TopologyClass, classify_topology, count_paths, scc, sinks, sources
from .network import Network, validate


class FunctionClassId(enum.Enum):
    ALL = "all"
    Z = "z"
    ZNL = "znl"
    ZNL_SEPARABLE = "znl-sep"


class Verdict(enum.Enum):
    IDENTIFIABLE = "identifiable"
    UNIDENTIFIABLE = "unidentifiable"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {"identifiable": 0, "unidentifiable": 1, "unknown": 2}[self.value]


# citation tags
CONSTANT_SPLIT = "constant-split: a node with two or more in-neighbours admits f+c / f-c"
ARBORESCENCE_ALL = "arborescence-all: every node except the source must be measured"
PATH_SINK = "path-sink: a path graph is identifiable iff its sink is measured"
TREE_SINKS = "tree-sinks: a tree is identifiable iff all sinks are measured"
DAG_SINKS = "dag-sinks: a DAG with nonlinear F_Z edges is identifiable iff all sinks are measured"
CONDENSATION_SINKS = (
    "condensation-sinks: with separable nonlinear edges one node per sink component of the "
    "condensation suffices, measured at any k > m_max + diam"
)
SINK_MEASUREMENT = "sink-measurement: incoming edges of an unmeasured sink are not identifiable"
UNIQUE_PATH = "unique-path: the only path from j to a measured i is the edge itself"
COVERED = "covered: the whole network is identifiable"
NO_RESULT = "no-result: no known rule covers this class and topology"


@dataclass(frozen=True)
class Requirement:
    """Required measurement set, or ``nodes=None`` when unavailable."""

    nodes: frozenset[int] | None
    citation: str
    components: tuple[frozenset[int], ...] = ()

    @property
    def available(self) -> bool:
        return self.nodes is not None


@dataclass
class IdentifiabilityReport:
    verdict: Verdict
    requirement: Requirement
    measured: frozenset[int]
    per_edge: dict[Edge, Verdict]
    justifications: dict[str, str] = field(default_factory=dict)
    k_used: int | None = None

    @property
    def required_measurements(self) -> frozenset[int] | None:
        return self.requirement.nodes

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict.value}"]
        lines.append(f"because: {self.justifications.get('verdict', '')}")
        lines.append("measured: " + ",".join(str(v) for v in sorted(self.measured)))
        if self.requirement.available:
            lines.append("required: " + ",".join(str(v) for v in sorted(self.requirement.nodes)))
        else:
            lines.append("required: unavailable")
        if self.k_used is not None:
            lines.append(f"k_used: {self.k_used}")
        for edge, status in self.per_edge.items():
            why = self.justifications.get(_edge_key(edge), "")
            lines.append(f"edge {edge[0]}<-{edge[1]}: {status.value}  [{why}]")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["edge", "status", "citation"])
        for edge, status in self.per_edge.items():
            writer.writerow([f"{edge[0]}<-{edge[1]}", status.value, self.justifications.get(_edge_key(edge), "")])
        return buf.getvalue()


def _edge_key(edge: Edge) -> str:
    return f"edge {edge[0]}<-{edge[1]}"


def _max_indegree(net: Network) -> int:
    return max(len(net.graph.in_neighbors(v)) for v in net.graph.nodes)


def required_measurements(net: Network, cls: FunctionClassId) -> Requirement:
    g = net.graph
    topo = classify_topology(g)
    if cls is FunctionClassId.ALL:
        if _max_indegree(net) >= 2:
            return Requirement(None, CONSTANT_SPLIT)
        if topo.within(TopologyClass.ARBORESCENCE):
            return Requirement(frozenset(g.nodes) - sources(g), ARBORESCENCE_ALL)
        return Requirement(None, NO_RESULT)
    if cls is FunctionClassId.Z:
        if topo is TopologyClass.PATH_GRAPH:
            return Requirement(frozenset(sinks(g)), PATH_SINK)
        if topo.within(TopologyClass.TREE):
            return Requirement(frozenset(sinks(g)), TREE_SINKS)
        return Requirement(None, NO_RESULT)
    if cls is FunctionClassId.ZNL:
        if topo.within(TopologyClass.DAG):
            return Requirement(frozenset(sinks(g)), DAG_SINKS)
        return Requirement(None, NO_RESULT)
    cond = scc(g)
    comps = tuple(cond.components[c - 1] for c in cond.sink_components())
    return Requirement(frozenset(min(c) for c in comps), CONDENSATION_SINKS, comps)


def is_identifiable(net: Network, cls: FunctionClassId, measured: Iterable[int]) -> IdentifiabilityReport:
    g = net.graph
    measured = frozenset(measured)
    for v in measured:
        g.check_node(v)
    report_net = validate(net)
    req = required_measurements(net, cls)
    topo = classify_topology(g)
    acyclic = topo.within(TopologyClass.DAG)
    per_edge: dict[Edge, Verdict] = {e: Verdict.UNKNOWN for e in g.sorted_edges()}
    why: dict[str, str] = {_edge_key(e): NO_RESULT for e in per_edge}

    def mark(edge: Edge, status: Verdict, citation: str) -> None:
        # an unidentifiability proof is never overridden
        if per_edge[edge] is Verdict.UNIDENTIFIABLE:
            return
        per_edge[edge] = status
        why[_edge_key(edge)] = citation

    verdict, because = Verdict.UNKNOWN, req.citation

    unmeasured_sinks = sorted(sinks(g) - measured)
    if unmeasured_sinks:
        verdict, because = Verdict.UNIDENTIFIABLE, SINK_MEASUREMENT
        for s in unmeasured_sinks:
            for j in g.in_neighbors(s):
                mark((s, j), Verdict.UNIDENTIFIABLE, SINK_MEASUREMENT)

    if cls is FunctionClassId.ALL:
        crowded = [v for v in g.nodes if len(g.in_neighbors(v)) >= 2]
        if crowded:
            verdict, because = Verdict.UNIDENTIFIABLE, CONSTANT_SPLIT
            for v in crowded:
                for j in g.in_neighbors(v):
                    mark((v, j), Verdict.UNIDENTIFIABLE, CONSTANT_SPLIT)
        elif req.available and not req.nodes <= measured:
            verdict, because = Verdict.UNIDENTIFIABLE, ARBORESCENCE_ALL
    elif cls is FunctionClassId.ZNL_SEPARABLE:
        if any(not (c & measured) for c in req.components):
            verdict, because = Verdict.UNIDENTIFIABLE, CONDENSATION_SINKS

    if verdict is Verdict.UNKNOWN and req.available:
        covered = req.nodes <= measured
        if cls is FunctionClassId.ZNL_SEPARABLE:
            covered = all(c & measured for c in req.components)
        if covered:
            verdict, because = Verdict.IDENTIFIABLE, req.citation

    if verdict is Verdict.IDENTIFIABLE:
        for e in per_edge:
            mark(e, Verdict.IDENTIFIABLE, COVERED)
    elif acyclic and cls is not FunctionClassId.ALL:
        for i in sorted(measured):
            for j in g.in_neighbors(i):
                if count_paths(g, j, i) == 1:
                    mark((i, j), Verdict.IDENTIFIABLE, UNIQUE_PATH)

    k_used = report_net.k_min_bar + 1 if cls is FunctionClassId.ZNL_SEPARABLE else None
    why["verdict"] = because
    why["required"] = req.citation
    return IdentifiabilityReport(verdict, req, measured, per_edge, why, k_used)
