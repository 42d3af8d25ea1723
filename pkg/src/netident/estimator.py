"""Recover polynomial edge functions from excitation/trace data.

Each edge gets a monomial dictionary.  Edges whose regressors are directly
observable (every in-neighbour of a measured node is measured or a source)
are fitted first by linear least squares.  The remaining coefficients enter
the measured outputs through compositions of unknown polynomials, so the
whole dictionary is then refined jointly by nonlinear least squares with an
exact Jacobian from forward sensitivities.  The Jacobian at the solution
decides uniqueness: any null direction is reported as ``RankDeficient``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .analyzer import FunctionClassId
from .errors import HorizonMismatch, InconsistentData, RankDeficient, TopologyMismatch
from .graph import Digraph, Edge, sources
from .network import Network, validate
from .poly import EdgeFunction, Exponents, coefficient_distance, monomials
from .simulate import ExcitationPlan, Trace, settling_depth, simulate_batch


def design_excitations(n_nodes: int, horizon: int, n_plans: int, seed: int = 0) -> list[ExcitationPlan]:
    """``n_plans`` i.i.d. plans with entries uniform on [-1, 1]."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.default_rng(seed)
    values = rng.uniform(-1.0, 1.0, (n_plans, n_nodes, horizon))
    return [ExcitationPlan(v) for v in values]


@dataclass(frozen=True)
class EstimationProblem:
    topology: Digraph
    memory_caps: Mapping[Edge, int]
    degree_cap: int
    class_constraint: FunctionClassId
    data: tuple[tuple[ExcitationPlan, Trace], ...]

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(self.data))
        if set(self.memory_caps) != set(self.topology.edges):
            raise TopologyMismatch("memory caps must name exactly the edges of the topology")
        if self.degree_cap < 1:
            raise ValueError("degree cap must be >= 1")

    @classmethod
    def from_network(
        cls,
        truth: Network,
        plans: Sequence[ExcitationPlan],
        degree_cap: int,
        class_constraint: FunctionClassId = FunctionClassId.ZNL,
        memory_caps: Mapping[Edge, int] | None = None,
    ) -> EstimationProblem:
        """Simulate ``truth`` on ``plans`` and wrap the data."""
        caps = memory_caps or {e: f.memory for e, f in truth.functions.items()}
        traces = simulate_batch(truth, list(plans))
        return cls(truth.graph, caps, degree_cap, class_constraint, tuple(zip(plans, traces)))

    def dictionary(self) -> dict[Edge, list[Exponents]]:
        constant = self.class_constraint is FunctionClassId.ALL
        separable = self.class_constraint is FunctionClassId.ZNL_SEPARABLE
        return {
            e: monomials(self.memory_caps[e], self.degree_cap, constant=constant, separable=separable)
            for e in self.topology.sorted_edges()
        }

    def size(self) -> int:
        return sum(len(v) for v in self.dictionary().values())


def default_horizon(net: Network) -> int:
    """``k_min_bar + 1``; for DAGs also long enough for every source to reach every sink."""
    horizon = validate(net).k_min_bar + 1
    if net.graph.is_acyclic():
        horizon = max(horizon, settling_depth(net) + 1)
    return horizon


def plans_needed(dictionary_size: int, horizon: int, measured_count: int, factor: int = 5) -> int:
    """Plans giving at least ``factor`` rows per dictionary entry."""
    rows_per_plan = max(1, horizon * measured_count)
    return max(1, -(-factor * dictionary_size // rows_per_plan))


# -- parametrised rollout -----------------------------------------------------


class _Model:
    """Network whose edge coefficients are a flat parameter vector."""

    def __init__(self, graph: Digraph, dictionary: Mapping[Edge, list[Exponents]]):
        self.graph = graph
        self.blocks: list[tuple[Edge, np.ndarray, slice]] = []
        start = 0
        for edge, monos in dictionary.items():
            arr = np.array(monos, dtype=int).reshape(len(monos), -1)
            self.blocks.append((edge, arr, slice(start, start + len(monos))))
            start += len(monos)
        self.size = start
        self.entries = [(edge, tuple(int(x) for x in mono)) for edge, arr, _ in self.blocks for mono in arr]

    @staticmethod
    def _features(x: np.ndarray, monos: np.ndarray) -> np.ndarray:
        # x: (B, m); result (B, K) with 0**0 == 1
        return np.prod(x[:, None, :] ** monos[None, :, :], axis=2)

    @staticmethod
    def _feature_grad(x: np.ndarray, monos: np.ndarray, d: int) -> np.ndarray:
        lowered = monos.copy()
        lowered[:, d] = np.maximum(lowered[:, d] - 1, 0)
        return monos[None, :, d] * np.prod(x[:, None, :] ** lowered[None, :, :], axis=2)

    def run(self, theta: np.ndarray, inputs: np.ndarray, jacobian: bool = False):
        batch, n, steps = inputs.shape
        y = np.zeros_like(inputs)
        sens = np.zeros((batch, n, steps, self.size)) if jacobian else None
        for s in range(steps):
            acc = inputs[:, :, s].copy()
            for (to, frm), monos, sl in self.blocks:
                m = monos.shape[1]
                x = np.stack(
                    [y[:, frm - 1, s - d] if s - d >= 0 else np.zeros(batch) for d in range(1, m + 1)], axis=1
                )
                feats = self._features(x, monos)
                coeffs = theta[sl]
                acc[:, to - 1] += feats @ coeffs
                if jacobian:
                    sens[:, to - 1, s, sl] += feats
                    for d in range(1, m + 1):
                        if s - d < 0:
                            continue
                        slope = self._feature_grad(x, monos, d - 1) @ coeffs
                        sens[:, to - 1, s, :] += slope[:, None] * sens[:, frm - 1, s - d, :]
            y[:, :, s] = acc
        return y, sens

    def functions(self, theta: np.ndarray, zero_tol: float, strict: bool = True) -> dict[Edge, EdgeFunction]:
        """Edge functions from ``theta``; all-zero edges raise, or are skipped when not ``strict``."""
        out = {}
        for edge, monos, sl in self.blocks:
            terms = {tuple(int(e) for e in mono): float(c) for mono, c in zip(monos, theta[sl]) if abs(c) > zero_tol}
            if not terms:
                if not strict:
                    continue
                raise InconsistentData(f"edge {edge} was fitted as identically zero")
            used = max(max((d + 1 for d, e in enumerate(exps) if e), default=1) for exps in terms)
            trimmed = {exps[:used]: c for exps, c in terms.items()}
            out[edge] = EdgeFunction(used, trimmed)
        return out


# -- results ------------------------------------------------------------------


@dataclass
class ResidualReport:
    entries: list[tuple[Edge, Exponents]]
    coefficients: np.ndarray
    stderr_proxy: np.ndarray
    max_residual: float
    rms_residual: float
    rows: int
    restarts_used: int = 0
    scale: float = 1.0  # residual tolerances are relative to max(1, max |observed|)
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["edge", "monomial", "coefficient", "residual"])
        for (edge, mono), c, s in zip(self.entries, self.coefficients, self.stderr_proxy):
            writer.writerow([f"{edge[0]}<-{edge[1]}", ",".join(map(str, mono)), repr(float(c)), f"{s:.3e}"])
        return buf.getvalue()


@dataclass
class FitResult:
    functions: dict[Edge, EdgeFunction]
    report: ResidualReport

    def network(self, graph: Digraph) -> Network:
        return Network(graph, self.functions)


# -- fitting ------------------------------------------------------------------


def _stack(prob: EstimationProblem):
    plans = [p for p, _ in prob.data]
    traces = [t for _, t in prob.data]
    shapes = {(p.values.shape, p.prehistory) for p in plans}
    if len(shapes) != 1:
        raise HorizonMismatch("all plans must share horizon and prehistory")
    pre = plans[0].prehistory
    for p, t in prob.data:
        if t.horizon != p.horizon:
            raise HorizonMismatch(f"trace horizon {t.horizon} != plan horizon {p.horizon}")
    return np.stack([p.values for p in plans]), np.stack([t.values for t in traces]), pre


def _peel(prob, model, inputs, observed, pre, measured) -> np.ndarray:
    """Linear least squares for edges whose regressors are all observable.

    Only used as a starting point; rows are aligned so that column ``s`` of
    every array refers to the same time step.
    """
    g = prob.topology
    theta = np.zeros(model.size)
    if pre:
        # outputs before time 1 are not observed
        return theta
    observable = set(measured) | sources(g)
    batch, _, total = inputs.shape
    blocks = {edge: (monos, sl) for edge, monos, sl in model.blocks}

    def series(v: int) -> np.ndarray:
        # a source's output is its own input one step later, as is every column here
        return inputs[:, v - 1, :] if not g.in_neighbors(v) else observed[:, v - 1, :]

    for i in sorted(measured):
        preds = g.in_neighbors(i)
        if not preds or not all(j in observable for j in preds):
            continue
        cols, slices = [], []
        for j in preds:
            monos, sl = blocks[(i, j)]
            y = series(j)
            m = monos.shape[1]
            feats = []
            for s in range(total):
                x = np.stack([y[:, s - d] if s - d >= 0 else np.zeros(batch) for d in range(1, m + 1)], axis=1)
                feats.append(model._features(x, monos))
            cols.append(np.concatenate(feats, axis=0))
            slices.append(sl)
        A = np.concatenate(cols, axis=1)
        b = (observed[:, i - 1, :] - inputs[:, i - 1, :]).T.reshape(-1)
        sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
        if rank < A.shape[1]:
            continue
        pos = 0
        for sl in slices:
            width = sl.stop - sl.start
            theta[sl] = sol[pos:pos + width]
            pos += width
    return theta


def fit_edges(
    prob: EstimationProblem,
    measured: Iterable[int],
    *,
    residual_tol: float = 1e-9,
    rank_tol: float = 1e-8,
    zero_tol: float = 1e-10,
    restarts: int = 8,
    seed: int = 0,
) -> FitResult:
    measured = sorted(set(measured))
    for v in measured:
        prob.topology.check_node(v)
    if not prob.data:
        raise ValueError("no data to fit")
    model = _Model(prob.topology, prob.dictionary())
    if not measured:
        raise RankDeficient(
            "no node is measured; every coefficient is unconstrained",
            [{entry: 1.0} for entry in model.entries],
        )
    inputs, observed, pre = _stack(prob)
    rows = [v - 1 for v in measured]
    target = observed[:, rows, :]
    scale = max(1.0, float(np.abs(target).max()))

    horizon = target.shape[2]

    def residual(theta, h=horizon):
        with np.errstate(all="ignore"):
            y, _ = model.run(theta, inputs[:, :, : pre + h])
        r = (y[:, rows, pre:] - target[:, :, :h]).reshape(-1)
        # diverging trial points are pushed back by a large finite penalty
        return np.nan_to_num(r, nan=1e6, posinf=1e6, neginf=-1e6)

    def jac(theta, h=horizon):
        with np.errstate(all="ignore"):
            _, sens = model.run(theta, inputs[:, :, : pre + h], jacobian=True)
        J = sens[:, rows, pre:, :].reshape(-1, model.size)
        return np.nan_to_num(J, nan=0.0, posinf=0.0, neginf=0.0)

    def solve(start, h):
        # only coefficients that already act on the window are free
        norms = np.linalg.norm(jac(start, h), axis=0)
        free = norms > 1e-12 * max(norms.max(), 1e-300)
        if not free.any():
            return start, float(np.abs(residual(start, h)).max())

        def sub(z):
            theta = start.copy()
            theta[free] = z
            return theta

        sol = least_squares(
            lambda z: residual(sub(z), h), start[free], jac=lambda z: jac(sub(z), h)[:, free],
            method="trf", x_scale="jac", ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=500,
        )
        return sub(sol.x), float(np.abs(sol.fun).max())

    theta0 = _peel(prob, model, inputs, observed, pre, measured)
    rng = np.random.default_rng(seed)
    best = None
    attempt = 0
    for attempt in range(restarts + 1):
        theta = theta0 if attempt == 0 else theta0 + rng.normal(0.0, 0.1, model.size) * (theta0 == 0)
        # grow the fitted time window one step at a time: each step only adds
        # coefficients that act through functions fitted on the shorter window
        for h in range(1, horizon + 1):
            theta, err = solve(theta, h)
        if best is None or err < best[1]:
            best = (theta, err)
        if err <= residual_tol * scale:
            break
    theta, max_res = best
    r = residual(theta)
    J = jac(theta)
    report = _report(model, theta, r, J)
    report.restarts_used = attempt
    report.scale = scale
    if max_res > residual_tol * scale:
        raise InconsistentData(
            f"max residual {max_res:.3e} above tolerance {residual_tol * scale:.3e} "
            "(data inconsistent with the dictionary, or the fit did not converge)"
        )
    directions = _null_directions(J, rank_tol, model.entries)
    if directions:
        err = RankDeficient(
            "data do not determine "
            + ", ".join(f"{e[0]}<-{e[1]}:{','.join(map(str, m))}" for e, m in sorted({k for d in directions for k in d})),
            directions,
        )
        err.fitted = model.functions(theta, zero_tol, strict=False)
        err.report = report
        raise err
    return FitResult(model.functions(theta, zero_tol), report)


def _null_directions(J: np.ndarray, rank_tol: float, entries) -> list[dict]:
    """Basis of the numerical null space of ``J``, one dict per direction.

    Columns are equilibrated by their norms, except that columns which are
    negligible against the largest one stay negligible.  The basis is put in
    reduced row echelon form so each direction names few entries.
    """
    norms = np.linalg.norm(J, axis=0)
    top = norms.max() if norms.size else 0.0
    if top == 0.0:
        basis = np.eye(J.shape[1])
    else:
        scale = np.where(norms > rank_tol * top, norms, top)
        _, s, vt = np.linalg.svd(J / scale, full_matrices=True)
        full = np.zeros(J.shape[1])
        full[: s.size] = s
        null = full <= rank_tol * s[0]
        basis = (vt[null] / scale).T if null.any() else np.zeros((J.shape[1], 0))
    if basis.shape[1] == 0:
        return []
    rows = _rref(basis.T)
    out = []
    for v in rows:
        v = v / np.abs(v).max()
        out.append({entries[p]: float(v[p]) for p in range(v.size) if abs(v[p]) > 1e-9})
    return out


def _rref(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    a = a.astype(float).copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[pivot, c]) <= tol:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        a[r] /= a[r, c]
        for k in range(rows):
            if k != r:
                a[k] -= a[k, c] * a[r]
        r += 1
    a[np.abs(a) < tol] = 0.0
    return a[:r]


def _report(model: _Model, theta: np.ndarray, r: np.ndarray, J: np.ndarray) -> ResidualReport:
    rows = r.size
    dof = max(1, rows - model.size)
    sigma2 = float(r @ r) / dof
    pinv = np.linalg.pinv(J.T @ J) if model.size else np.zeros((0, 0))
    stderr = np.sqrt(np.maximum(sigma2 * np.diag(pinv), 0.0))
    s = np.linalg.svd(J, compute_uv=False) if J.size else np.zeros(0)
    return ResidualReport(
        list(model.entries), theta.copy(), stderr, float(np.abs(r).max()) if rows else 0.0,
        float(np.sqrt(np.mean(r**2))) if rows else 0.0, rows, singular_values=s,
    )


def recovery_error(truth: Network, fitted: Mapping[Edge, EdgeFunction]) -> float:
    """Largest absolute coefficient difference over all edges."""
    if set(truth.functions) != set(fitted):
        raise TopologyMismatch("fitted edges differ from the true topology")
    return max((coefficient_distance(truth[e], fitted[e]) for e in truth.functions), default=0.0)
