"""Command line entry point: ``netident <command> ...``.

Exit codes: 0 identifiable / pass / success, 1 unidentifiable / fail,
2 unknown, 64 unreadable input file, 65 a precondition of the requested
operation does not hold, 66 a file could not be opened.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import formats
from .analyzer import FunctionClassId, Verdict, is_identifiable, required_measurements
from .errors import NetidentError, ParseError, RankDeficient, TopologyMismatch
from .estimator import EstimationProblem, default_horizon, design_excitations, fit_edges, recovery_error
from .forge import (
    Construction,
    ForgedPair,
    forge_arborescence_shift,
    forge_gamma_split,
    forge_linear_superposition,
    verify_indistinguishable,
)
from .network import validate
from .poly import Univariate
from .simulate import ExcitationPlan, simulate
from .unfolding import unfold

EXIT_PARSE = 64
EXIT_PRECONDITION = 65
EXIT_NOINPUT = 66


class PreconditionFailed(Exception):
    pass


def _node_list(text: str, node_count: int | None = None) -> list[int]:
    if text == "all" and node_count is not None:
        return list(range(1, node_count + 1))
    try:
        return sorted({int(p) for p in text.split(",") if p.strip()})
    except ValueError:
        raise PreconditionFailed(f"bad node list {text!r}") from None


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


# -- commands -----------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    net = formats.parse_network(_read(args.network))
    cls = FunctionClassId(args.cls)
    report = validate(net)
    if args.measure is None:
        req = required_measurements(net, cls)
        if req.available:
            if req.components:
                parts = [
                    f"{min(c)} (component {{{','.join(map(str, sorted(c)))}}})" for c in req.components
                ]
                out.write("measure: " + ", ".join(parts) + "\n")
            else:
                out.write("measure: " + ",".join(map(str, sorted(req.nodes))) + "\n")
        else:
            out.write("measure: unavailable\n")
        out.write(f"because: {req.citation}\n")
        if cls is FunctionClassId.ZNL_SEPARABLE:
            out.write(f"k_min: {report.k_min_bar}\n")
            out.write(f"k_used: {report.k_min_bar + 1}\n")
        if req.available:
            return 0
        constant_split = cls is FunctionClassId.ALL and req.citation.startswith("constant-split")
        return Verdict.UNIDENTIFIABLE.exit_code if constant_split else Verdict.UNKNOWN.exit_code
    measured = _node_list(args.measure, net.node_count)
    rep = is_identifiable(net, cls, measured)
    out.write(rep.to_text())
    if cls is FunctionClassId.ZNL_SEPARABLE:
        out.write(f"k_min: {report.k_min_bar}\n")
    if args.csv:
        Path(args.csv).write_text(rep.to_csv(), encoding="utf-8")
    return rep.verdict.exit_code


def cmd_simulate(args, out) -> int:
    net = formats.parse_network(_read(args.network))
    plan = formats.parse_excitation(_read(args.excite), net.node_count)
    if args.horizon < 1 or plan.horizon > args.horizon:
        raise PreconditionFailed(f"excitation reaches time {plan.horizon - 1}, beyond horizon {args.horizon}")
    if plan.horizon < args.horizon:
        padded = np.zeros((net.node_count, args.horizon))
        padded[:, : plan.horizon] = plan.values
        plan = ExcitationPlan(padded)
    trace = simulate(net, plan)
    text = formats.dump_trace(trace)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def cmd_unfold(args, out) -> int:
    net = formats.parse_network(_read(args.network))
    u = unfold(net, args.node, args.k)
    dot = u.to_dot()
    if not args.dot:
        out.write(dot)
    else:
        Path(args.dot).write_text(dot, encoding="utf-8")
        out.write(f"copies: {len(u.copies)}\nedges: {len(u.edges)}\n")
    return 0


def cmd_forge(args, out) -> int:
    net = formats.parse_network(_read(args.network))
    mode = Construction(args.mode)
    if mode is Construction.GAMMA_SPLIT:
        _need(args, "node", "p", "q", "gamma")
        pair = forge_gamma_split(net, args.node, args.p, args.q, args.gamma)
    elif mode is Construction.ARBORESCENCE_SHIFT:
        _need(args, "node", "gamma")
        pair = forge_arborescence_shift(net, args.node, args.gamma)
    else:
        _need(args, "hub", "p", "q", "delta")
        a1 = args.a1 if args.a1 is not None else _linear(net, args.hub, args.p)
        a2 = args.a2 if args.a2 is not None else _linear(net, args.hub, args.q)
        pair = forge_linear_superposition(net, args.hub, args.p, args.q, a1, a2, _univariate(args.delta))
    formats.save_network(pair.alternative, args.out)
    manifest = formats.manifest_line(mode.value, pair.params, pair.measured, args.network, args.out)
    Path(args.manifest or args.out + ".manifest").write_text(manifest, encoding="utf-8")
    out.write(manifest)
    return 0


def _need(args, *names) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise PreconditionFailed("missing option(s): " + ", ".join("--" + n for n in missing))


def _linear(net, hub: int, src: int) -> float:
    f = net.functions.get((hub, src))
    if f is None or f.memory != 1 or len(f.terms) != 1 or f.terms[0][0] != (1,):
        raise PreconditionFailed(f"edge ({hub}, {src}) is not linear; pass --a1/--a2")
    return f.terms[0][1]


def _univariate(text: str) -> Univariate:
    try:
        pairs = [p.split(":") for p in text.split(",") if p.strip()]
        return Univariate({int(p): float(c) for p, c in pairs})
    except ValueError:
        raise PreconditionFailed(f"bad polynomial {text!r}; expected power:coeff,...") from None


def cmd_verify(args, out) -> int:
    a = formats.parse_network(_read(args.network))
    b = formats.parse_network(_read(args.alt))
    if a.graph != b.graph:
        raise TopologyMismatch("the two networks have different digraphs")
    measured = frozenset(_node_list(args.measure, a.node_count))
    pair = ForgedPair(a, b, measured, None)
    result = verify_indistinguishable(pair, args.trials, args.horizon, args.seed, args.tol)
    if result.passed:
        out.write(f"PASS trials={result.trials} max_discrepancy={result.max_discrepancy:.3e}\n")
        return 0
    w = result.witness
    out.write(f"FAIL node={w.node} k={w.k} discrepancy={w.discrepancy:.6e}\n")
    out.write("# witness excitation, one row per node\n")
    for node in range(1, w.plan.node_count + 1):
        row = " ".join(f"{x:.17g}" for x in w.plan.values[node - 1])
        out.write(f"u{node}: {row}\n")
    if w.plan.prehistory:
        out.write(f"# first {w.plan.prehistory} columns precede time 0\n")
    return 1


def cmd_estimate(args, out) -> int:
    topo = formats.parse_network(_read(args.topology))
    truth = formats.parse_network(_read(args.truth))
    if topo.graph != truth.graph:
        raise TopologyMismatch("truth network does not match the topology file")
    cls = FunctionClassId(args.cls)
    if args.measure:
        measured = _node_list(args.measure, truth.node_count)
    else:
        req = required_measurements(truth, cls)
        if not req.available:
            raise PreconditionFailed(f"no measurement set known for this class ({req.citation}); pass --measure")
        measured = sorted(req.nodes)
    horizon = args.horizon or default_horizon(truth)
    plans = design_excitations(truth.node_count, horizon, args.plans, args.seed)
    caps = {e: f.memory for e, f in topo.functions.items()}
    prob = EstimationProblem.from_network(truth, plans, args.degree, cls, caps)
    try:
        fit = fit_edges(prob, measured, seed=args.seed)
    except RankDeficient as exc:
        sys.stderr.write(f"RankDeficient: {len(exc.directions)} undetermined direction(s)\n")
        for d in exc.directions:
            terms = " ".join(f"{w:+.4g}*[{e[0]}<-{e[1]}:{','.join(map(str, m))}]" for (e, m), w in d.items())
            sys.stderr.write(f"  {terms}\n")
        return EXIT_PRECONDITION
    err = recovery_error(truth, fit.functions)
    fitted = fit.network(truth.graph)
    if args.out:
        formats.save_network(fitted, args.out)
    else:
        out.write(formats.dump_network(fitted))
    if args.report:
        Path(args.report).write_text(fit.report.to_csv(), encoding="utf-8")
    out.write(f"measured: {','.join(map(str, measured))}\n")
    out.write(f"recovery_error: {err:.3e}\n")
    return 0 if err <= 1e-6 else 1


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netident", description="Identifiability of nonlinear networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="required measurements or a full identifiability report")
    p.add_argument("--network", required=True)
    p.add_argument("--class", dest="cls", required=True, choices=[c.value for c in FunctionClassId])
    p.add_argument("--measure", help="comma separated nodes, or 'all'")
    p.add_argument("--csv", help="also write the per-edge report as CSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="simulate a network on an excitation file")
    p.add_argument("--network", required=True)
    p.add_argument("--excite", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("unfold", help="unfolded digraph of a separable network as DOT")
    p.add_argument("--network", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("forge", help="build an indistinguishable alternative network")
    p.add_argument("--network", required=True)
    p.add_argument("--mode", required=True, choices=[c.value for c in Construction])
    p.add_argument("--node", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--hub", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--delta", help="univariate polynomial as power:coeff,...")
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("verify", help="check two networks agree on measured nodes")
    p.add_argument("--network", required=True)
    p.add_argument("--alt", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--horizon", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="simulate data from a true network and fit it back")
    p.add_argument("--topology", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--class", dest="cls", default="znl", choices=[c.value for c in FunctionClassId])
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--plans", type=int, default=100)
    p.add_argument("--horizon", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except OSError as exc:
        sys.stderr.write(f"cannot open file: {exc}\n")
        return EXIT_NOINPUT
    except (NetidentError, PreconditionFailed, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
