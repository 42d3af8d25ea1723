"""Discrete-time rollout of a network started at rest.

``y_i^k = u_i^{k-1} + sum_j f_ij(y_j^{k-1}, ..., y_j^{k-m})`` for ``k >= 1``
with ``y^k = 0`` for ``k <= 0``.  Plans are stored as arrays of shape
``(n, prehistory + K)`` whose column ``c`` holds ``u^{c - prehistory}``;
traces are arrays of shape ``(n, K)`` whose column ``c`` holds ``y^{c+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import HorizonMismatch, TimeOutOfRange
from .network import Network, validate


@dataclass(frozen=True, eq=False)
class ExcitationPlan:
    """Inputs ``u_i^t`` for ``t`` in ``-prehistory .. horizon - 1``.

    A nonzero ``prehistory`` moves the rest time back to ``-prehistory``;
    only meaningful for acyclic networks, where it lets outputs at
    ``k >= 1`` see inputs from before time 0.
    """

    values: np.ndarray
    prehistory: int = 0

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError("plan values must be a 2-D array (node, time)")
        if arr.shape[1] - self.prehistory < 1:
            raise ValueError("plan horizon must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("plan values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, node_count: int, horizon: int, prehistory: int = 0) -> ExcitationPlan:
        return cls(np.zeros((node_count, horizon + prehistory)), prehistory)

    @classmethod
    def from_entries(cls, node_count: int, horizon: int, entries: Mapping[tuple[int, int], float]) -> ExcitationPlan:
        arr = np.zeros((node_count, horizon))
        for (node, t), v in entries.items():
            if not (1 <= node <= node_count and 0 <= t < horizon):
                raise TimeOutOfRange(f"excitation entry {(node, t)} outside plan")
            arr[node - 1, t] = v
        return cls(arr)

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def horizon(self) -> int:
        return self.values.shape[1] - self.prehistory

    def u(self, node: int, t: int) -> float:
        if not (-self.prehistory <= t < self.horizon):
            raise TimeOutOfRange(f"time {t} outside plan")
        return float(self.values[node - 1, t + self.prehistory])

    def with_entry(self, node: int, t: int, value: float) -> ExcitationPlan:
        arr = self.values.copy()
        arr[node - 1, t + self.prehistory] = value
        return ExcitationPlan(arr, self.prehistory)

    def __eq__(self, other):
        return (
            isinstance(other, ExcitationPlan)
            and self.prehistory == other.prehistory
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class Trace:
    """Outputs ``y_i^k`` for ``k = 1..K``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def horizon(self) -> int:
        return self.values.shape[1]

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    def y(self, node: int, k: int) -> float:
        if k <= 0:
            return 0.0
        if k > self.horizon:
            raise TimeOutOfRange(f"time {k} beyond horizon {self.horizon}")
        return float(self.values[node - 1, k - 1])

    def __eq__(self, other):
        return isinstance(other, Trace) and np.array_equal(self.values, other.values)


# -- compiled rollout ----------------------------------------------------------


class CompiledNetwork:
    """Flat per-edge term arrays for repeated batched simulation."""

    def __init__(self, net: Network):
        self.node_count = net.node_count
        self.edges = []
        for (to, frm), f in net.functions.items():
            exps = np.array([e for e, _ in f.terms], dtype=int)
            coeffs = np.array([c for _, c in f.terms])
            self.edges.append((to - 1, frm - 1, f.memory, exps, coeffs))

    def run(self, inputs: np.ndarray) -> np.ndarray:
        """Roll out a batch; ``inputs`` has shape ``(B, n, T)``, result likewise.

        Output column ``s`` is the response to input columns ``<= s``.
        """
        inputs = np.asarray(inputs, dtype=float)
        y = np.zeros_like(inputs)
        steps = inputs.shape[2]
        for s in range(steps):
            acc = inputs[:, :, s].copy()
            for to, frm, memory, exps, coeffs in self.edges:
                args = [y[:, frm, s - d] if s - d >= 0 else None for d in range(1, memory + 1)]
                contrib = 0.0
                for row, c in zip(exps, coeffs):
                    value = c
                    for x, e in zip(args, row):
                        if e:
                            value = value * (x**e if x is not None else 0.0)
                    contrib = contrib + value
                acc[:, to] += contrib
            y[:, :, s] = acc
        return y


def simulate_batch(net: Network, plans: Sequence[ExcitationPlan]) -> list[Trace]:
    """Simulate many plans of equal shape in one vectorised pass."""
    if not plans:
        return []
    validate(net)
    shapes = {(p.values.shape, p.prehistory) for p in plans}
    if len(shapes) != 1:
        raise HorizonMismatch("plans in a batch must share horizon and prehistory")
    _check_prehistory(net, plans[0])
    stacked = np.stack([p.values for p in plans])
    out = CompiledNetwork(net).run(stacked)
    pre = plans[0].prehistory
    return [Trace(out[b, :, pre:]) for b in range(len(plans))]


def simulate_array(net: Network, inputs: np.ndarray, prehistory: int = 0) -> np.ndarray:
    """Array form of :func:`simulate_batch`: ``(B, n, pre + K)`` in, ``(B, n, K)`` out."""
    return CompiledNetwork(net).run(inputs)[:, :, prehistory:]


def _check_prehistory(net: Network, plan: ExcitationPlan) -> None:
    if plan.prehistory and not net.graph.is_acyclic():
        raise ValueError("inputs before time 0 are only allowed on acyclic networks")
    if plan.node_count != net.node_count:
        raise ValueError(f"plan has {plan.node_count} nodes, network has {net.node_count}")


def simulate(net: Network, plan: ExcitationPlan) -> Trace:
    return simulate_batch(net, [plan])[0]


def measured_response(net: Network, node: int, k: int, plan: ExcitationPlan) -> float:
    """``y_node^k - u_node^{k-1}``: the response without direct feed-through."""
    if not (1 <= k <= plan.horizon):
        raise TimeOutOfRange(f"time {k} outside 1..{plan.horizon}")
    net.graph.check_node(node)
    trace = simulate(net, plan)
    return trace.y(node, k) - plan.u(node, k - 1)


def traces_indistinguishable(a: Trace, b: Trace, measured: Iterable[int], tol: float = 1e-12) -> bool:
    if a.horizon != b.horizon:
        raise HorizonMismatch(f"horizons differ: {a.horizon} vs {b.horizon}")
    rows = [v - 1 for v in sorted(set(measured))]
    if not rows:
        return True
    return bool(np.all(np.abs(a.values[rows] - b.values[rows]) <= tol))


def settling_depth(net: Network) -> int:
    """Longest memory-weighted path into any node of an acyclic network.

    Starting at rest this many steps before time 0 makes every output at
    ``k >= 1`` independent of the rest convention.
    """
    order = net.graph.topological_order()
    if order is None:
        raise ValueError("settling depth is only defined for acyclic networks")
    depth = dict.fromkeys(net.graph.nodes, 0)
    for v in order:
        for j in net.graph.in_neighbors(v):
            depth[v] = max(depth[v], depth[j] + net[(v, j)].memory)
    return max(depth.values())
