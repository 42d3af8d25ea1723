"""Text formats: network files, signal CSVs and forge manifests.

Network file grammar (line oriented, ``#`` starts a comment)::

    NETWORK n=<int>
    EDGE to=<int> from=<int> memory=<int>
    TERM coeff=<float> exps=<int>,<int>,...

Each ``EDGE`` line is followed by one or more ``TERM`` lines; entry ``d`` of
``exps`` is the exponent of the output delayed by ``d + 1`` steps.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import NetidentError, ParseError
from .network import Network, validate
from .poly import EdgeFunction
from .simulate import ExcitationPlan, Trace


def _fmt(x: float) -> str:
    return repr(float(x))


# -- network files ------------------------------------------------------------


def dump_network(net: Network) -> str:
    lines = [f"NETWORK n={net.node_count}"]
    for (to, frm), f in net.functions.items():
        lines.append(f"EDGE to={to} from={frm} memory={f.memory}")
        for exps, c in f.terms:
            lines.append(f"TERM coeff={_fmt(c)} exps={','.join(str(e) for e in exps)}")
    return "\n".join(lines) + "\n"


def _fields(text: str, line_no: int, offset: int, expected: tuple[str, ...]) -> dict[str, tuple[str, int]]:
    """Parse ``key=value`` tokens; returns key -> (value, column)."""
    out: dict[str, tuple[str, int]] = {}
    pos = 0
    for token in text.split():
        pos = text.index(token, pos)
        column = offset + pos + 1
        pos += len(token)
        key, eq, value = token.partition("=")
        if not eq or not value:
            raise ParseError(f"expected key=value, got {token!r}", line_no, column)
        if key not in expected:
            raise ParseError(f"unexpected key {key!r}", line_no, column)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line_no, column)
        out[key] = (value, column)
    for key in expected:
        if key not in out:
            raise ParseError(f"missing {key}=", line_no, offset + len(text.rstrip()) + 1)
    return out


def _int(field: tuple[str, int], line_no: int, minimum: int | None = None) -> int:
    value, column = field
    try:
        out = int(value)
    except ValueError:
        raise ParseError(f"expected an integer, got {value!r}", line_no, column) from None
    if minimum is not None and out < minimum:
        raise ParseError(f"value {out} must be >= {minimum}", line_no, column)
    return out


def _float(field: tuple[str, int], line_no: int) -> float:
    value, column = field
    try:
        out = float(value)
    except ValueError:
        raise ParseError(f"expected a number, got {value!r}", line_no, column) from None
    if not math.isfinite(out):
        raise ParseError(f"value {value!r} is not finite", line_no, column)
    return out


def parse_network(text: str) -> Network:
    node_count = None
    edges: list[dict] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        offset = len(body) - len(body.lstrip())
        keyword, _, rest = stripped.partition(" ")
        rest_offset = offset + len(keyword) + 1
        if keyword == "NETWORK":
            if node_count is not None:
                raise ParseError("second NETWORK line", line_no, offset + 1)
            f = _fields(rest, line_no, rest_offset, ("n",))
            node_count = _int(f["n"], line_no, 1)
        elif keyword == "EDGE":
            if node_count is None:
                raise ParseError("EDGE before NETWORK", line_no, offset + 1)
            f = _fields(rest, line_no, rest_offset, ("to", "from", "memory"))
            to, frm = _int(f["to"], line_no, 1), _int(f["from"], line_no, 1)
            for key, v in (("to", to), ("from", frm)):
                if v > node_count:
                    raise ParseError(f"node {v} outside 1..{node_count}", line_no, f[key][1])
            memory = _int(f["memory"], line_no, 1)
            edges.append({"edge": (to, frm), "memory": memory, "terms": {}, "line": line_no, "col": offset + 1})
        elif keyword == "TERM":
            if not edges:
                raise ParseError("TERM outside an EDGE block", line_no, offset + 1)
            block = edges[-1]
            f = _fields(rest, line_no, rest_offset, ("coeff", "exps"))
            coeff = _float(f["coeff"], line_no)
            value, column = f["exps"]
            try:
                exps = tuple(int(p) for p in value.split(","))
            except ValueError:
                raise ParseError(f"bad exponent list {value!r}", line_no, column) from None
            if len(exps) != block["memory"]:
                raise ParseError(f"{len(exps)} exponents for memory {block['memory']}", line_no, column)
            if any(e < 0 for e in exps):
                raise ParseError("negative exponent", line_no, column)
            if exps in block["terms"]:
                raise ParseError(f"repeated exponents {value}", line_no, column)
            block["terms"][exps] = coeff
        else:
            raise ParseError(f"unknown keyword {keyword!r}", line_no, offset + 1)
    if node_count is None:
        raise ParseError("missing NETWORK line", max(1, len(text.splitlines())), 1)
    functions = {}
    for block in edges:
        if block["edge"] in functions:
            raise ParseError(f"duplicate edge {block['edge']}", block["line"], block["col"])
        if not block["terms"]:
            raise ParseError("EDGE without TERM lines", block["line"], block["col"])
        try:
            functions[block["edge"]] = EdgeFunction(block["memory"], block["terms"])
        except (ValueError, NetidentError) as exc:
            raise ParseError(str(exc), block["line"], block["col"]) from None
    try:
        net = Network.from_functions(node_count, functions)
        validate(net)
    except (ValueError, NetidentError) as exc:
        line = edges[0]["line"] if edges else 1
        raise ParseError(str(exc), line, 1) from None
    return net


def load_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def save_network(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_network(net))


# -- signal CSVs --------------------------------------------------------------

HEADER = "k,node,value"


def _signal_rows(text: str):
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ParseError(f"expected header {HEADER!r}", 1, 1)
    for line_no, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line_no, 1)
        cols = [1, len(parts[0]) + 2, len(parts[0]) + len(parts[1]) + 3]
        try:
            k = int(parts[0])
        except ValueError:
            raise ParseError(f"bad time {parts[0]!r}", line_no, cols[0]) from None
        try:
            node = int(parts[1])
        except ValueError:
            raise ParseError(f"bad node {parts[1]!r}", line_no, cols[1]) from None
        value = _float((parts[2].strip(), cols[2]), line_no)
        yield line_no, cols, k, node, value


def parse_excitation(text: str, node_count: int, horizon: int | None = None) -> ExcitationPlan:
    rows = list(_signal_rows(text))
    if horizon is None:
        horizon = max((k for _, _, k, _, _ in rows), default=0) + 1
    values = np.zeros((node_count, horizon))
    seen = set()
    for line_no, cols, k, node, value in rows:
        if not 0 <= k < horizon:
            raise ParseError(f"excitation time {k} outside 0..{horizon - 1}", line_no, cols[0])
        if not 1 <= node <= node_count:
            raise ParseError(f"node {node} outside 1..{node_count}", line_no, cols[1])
        if (k, node) in seen:
            raise ParseError(f"repeated entry for k={k}, node={node}", line_no, 1)
        seen.add((k, node))
        values[node - 1, k] = value
    return ExcitationPlan(values)


def parse_trace(text: str, node_count: int) -> Trace:
    rows = list(_signal_rows(text))
    horizon = max((k for _, _, k, _, _ in rows), default=0)
    if horizon < 1:
        raise ParseError("trace has no samples", 1, 1)
    values = np.full((node_count, horizon), np.nan)
    for line_no, cols, k, node, value in rows:
        if not 1 <= k <= horizon:
            raise ParseError(f"trace time {k} outside 1..{horizon}", line_no, cols[0])
        if not 1 <= node <= node_count:
            raise ParseError(f"node {node} outside 1..{node_count}", line_no, cols[1])
        if not np.isnan(values[node - 1, k - 1]):
            raise ParseError(f"repeated entry for k={k}, node={node}", line_no, 1)
        values[node - 1, k - 1] = value
    missing = np.argwhere(np.isnan(values))
    if missing.size:
        node, k = missing[0]
        raise ParseError(f"missing trace entry k={k + 1}, node={node + 1}", len(text.splitlines()), 1)
    return Trace(values)


def dump_excitation(plan: ExcitationPlan) -> str:
    if plan.prehistory:
        raise ValueError("signal files hold times >= 0 only")
    lines = [HEADER]
    for k in range(plan.horizon):
        for node in range(1, plan.node_count + 1):
            lines.append(f"{k},{node},{_fmt(plan.u(node, k))}")
    return "\n".join(lines) + "\n"


def dump_trace(trace: Trace) -> str:
    lines = [HEADER]
    for k in range(1, trace.horizon + 1):
        for node in range(1, trace.node_count + 1):
            lines.append(f"{k},{node},{_fmt(trace.y(node, k))}")
    return "\n".join(lines) + "\n"


# -- forge manifests ----------------------------------------------------------


def manifest_line(construction: str, params: dict, measured: Iterable[int], original: str, alternative: str) -> str:
    parts = [f"FORGE construction={construction}", f"original={original}", f"alternative={alternative}"]
    for key in sorted(params):
        value = params[key]
        if isinstance(value, dict):
            value = ",".join(f"{p}:{_fmt(c)}" for p, c in sorted(value.items()))
        elif isinstance(value, float):
            value = _fmt(value)
        parts.append(f"{key}={value}")
    parts.append("measured=" + ",".join(str(v) for v in sorted(measured)))
    return " ".join(parts) + "\n"


def parse_manifest(text: str) -> dict[str, str]:
    line = next((ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
    keyword, _, rest = line.partition(" ")
    if keyword != "FORGE":
        raise ParseError("expected a FORGE line", 1, 1)
    out = {}
    for token in rest.split():
        key, _, value = token.partition("=")
        out[key] = value
    return out
