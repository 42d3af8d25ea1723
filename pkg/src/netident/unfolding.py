"""Time-expanded DAG of node copies for separable networks.

Copy ``(v, t)`` (rendered ``v_t``) stands for the output ``y_v^{k-t}`` of the
original network, so it is driven by the input ``u_v^{k-t-1}``.  An edge
``((w, m), (v, t))`` with ``m < t`` carries the univariate component
``f_{w,v}^{{t-m}}`` and feeds copy ``v_t`` into copy ``w_m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KTooSmall, NotSeparable, PlanTooShort
from .network import Network, validate
from .poly import Univariate, separate
from .simulate import ExcitationPlan, simulate_batch

Copy = tuple[int, int]


@dataclass(frozen=True)
class UnfoldedNetwork:
    node: int
    k: int
    copies: tuple[Copy, ...]
    edges: dict[tuple[Copy, Copy], Univariate]

    @property
    def root(self) -> Copy:
        return (self.node, 0)

    def input_time(self, copy: Copy) -> int:
        """Time index of the excitation driving ``copy``."""
        return self.k - copy[1] - 1

    @property
    def input_of(self) -> dict[Copy, tuple[int, int]]:
        """Copy -> ``(node, time)`` of its excitation."""
        return {c: (c[0], self.input_time(c)) for c in self.copies}

    def layers(self) -> dict[int, list[Copy]]:
        out: dict[int, list[Copy]] = {}
        for c in self.copies:
            out.setdefault(c[1], []).append(c)
        return dict(sorted(out.items()))

    def in_edges(self, copy: Copy) -> list[tuple[Copy, Univariate]]:
        return [(src, f) for (dst, src), f in self.edges.items() if dst == copy]

    def sinks(self) -> list[Copy]:
        has_out = {src for _, src in self.edges}
        return [c for c in self.copies if c not in has_out]

    def evaluate(self, inputs: np.ndarray) -> np.ndarray:
        """Root output for inputs of shape ``(B, n, T)`` indexed by time ``0..T-1``."""
        values: dict[Copy, np.ndarray] = {}
        incoming: dict[Copy, list[tuple[Copy, Univariate]]] = {c: [] for c in self.copies}
        for (dst, src), f in self.edges.items():
            incoming[dst].append((src, f))
        # edges only go from larger to smaller creation time
        for c in sorted(self.copies, key=lambda c: (-c[1], c[0])):
            acc = inputs[:, c[0] - 1, self.input_time(c)].copy()
            for src, f in incoming[c]:
                acc = acc + f(values[src])
            values[c] = acc
        return values[self.root]

    def to_dot(self, name: str = "H") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for t, layer in self.layers().items():
            lines.append(f"  subgraph cluster_{t} {{")
            lines.append(f'    label="u^(k-{t + 1})";')
            lines.append("    rank=same;")
            for v, tt in layer:
                lines.append(f'    "{v}_{tt}";')
            lines.append("  }")
        for (dst, src) in sorted(self.edges):
            w, m = dst
            v, t = src
            lines.append(f'  "{v}_{t}" -> "{w}_{m}" [label="f_{{{w},{v}}}^{{{t - m}}}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def unfold(net: Network, i: int, k: int) -> UnfoldedNetwork:
    if k < 2:
        raise KTooSmall(f"k must be >= 2, got {k}")
    validate(net)
    net.graph.check_node(i)
    comps = {}
    for edge, f in net.functions.items():
        try:
            comps[edge] = separate(f).components
        except NotSeparable as exc:
            raise NotSeparable(f"edge {edge}: {exc}") from None
    relevant: set[Copy] = {(i, 0)}
    edges: dict[tuple[Copy, Copy], Univariate] = {}
    for t in range(1, k):
        for m in range(t):
            for w in net.graph.nodes:
                if (w, m) not in relevant:
                    continue
                for v in net.graph.in_neighbors(w):
                    comp = comps[(w, v)].get(t - m)
                    if comp:
                        edges[((w, m), (v, t))] = comp
        # a copy created now becomes relevant once it feeds something
        relevant |= {src for (_, src) in edges if src[1] == t}
    # with the guard every connected copy already reaches the root; keep the
    # explicit reverse reachability so pruning does not rely on that
    keep = {(i, 0)}
    frontier = [(i, 0)]
    feeders: dict[Copy, list[Copy]] = {}
    for dst, src in edges:
        feeders.setdefault(dst, []).append(src)
    while frontier:
        c = frontier.pop()
        for src in feeders.get(c, ()):
            if src not in keep:
                keep.add(src)
                frontier.append(src)
    kept_edges = {e: f for e, f in edges.items() if e[0] in keep and e[1] in keep}
    copies = tuple(sorted(keep, key=lambda c: (c[1], c[0])))
    return UnfoldedNetwork(i, k, copies, dict(sorted(kept_edges.items())))


def check_unfolding_equivalence(
    net: Network, u: UnfoldedNetwork, plan: ExcitationPlan | list[ExcitationPlan], tol: float = 1e-12
) -> bool:
    """Root output of ``u`` equals ``y_i^k`` of ``net`` for every plan given."""
    plans = plan if isinstance(plan, list) else [plan]
    for p in plans:
        if p.horizon < u.k:
            raise PlanTooShort(f"plan horizon {p.horizon} < k = {u.k}")
        if p.prehistory:
            raise ValueError("unfolding assumes a network at rest at time 0")
    traces = simulate_batch(net, plans)
    direct = np.array([tr.y(u.node, u.k) for tr in traces])
    unfolded = u.evaluate(np.stack([p.values for p in plans]))
    return bool(np.all(np.abs(direct - unfolded) <= tol))
