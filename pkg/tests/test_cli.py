import io

import numpy as np
import pytest

from fixtures import SQ, bridge_network, example_dag, six_node_network
from netident import EdgeFunction, Network, dump_network, load_network
from netident.cli import main
from netident.formats import dump_excitation, parse_manifest, parse_trace
from netident.simulate import ExcitationPlan


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    nets = {
        "dag": example_dag(),
        "six": six_node_network(),
        "bridge": bridge_network(),
        "chain": Network.from_functions(3, {(2, 1): SQ, (3, 2): EdgeFunction(1, {(2,): 0.5, (3,): 0.25})}),
        "cross": Network.from_functions(2, {(2, 1): EdgeFunction(2, {(1, 1): 1.0})}),
    }
    for name, net in nets.items():
        path = tmp_path / f"{name}.net"
        path.write_text(dump_network(net))
        paths[name] = str(path)
    paths["dir"] = tmp_path
    return paths


def test_analyze_required(files):
    code, out = run("analyze", "--network", files["dag"], "--class", "znl")
    assert code == 0 and "measure: 3" in out
    code, out = run("analyze", "--network", files["six"], "--class", "znl-sep")
    assert code == 0 and "measure: 1 (component {1,2,3,4})" in out
    assert "k_min: 5" in out
    code, out = run("analyze", "--network", files["bridge"], "--class", "all")
    assert code == 1 and "constant-split" in out


def test_analyze_report(files):
    csv_path = files["dir"] / "r.csv"
    code, out = run("analyze", "--network", files["bridge"], "--class", "z", "--measure", "4", "--csv", str(csv_path))
    assert code == 2
    assert "edge 4<-2: identifiable" in out
    assert csv_path.read_text().splitlines()[0] == "edge,status,citation"
    code, _ = run("analyze", "--network", files["dag"], "--class", "znl", "--measure", "3")
    assert code == 0
    code, _ = run("analyze", "--network", files["dag"], "--class", "znl", "--measure", "2")
    assert code == 1


def test_simulate(files):
    plan = ExcitationPlan(np.random.default_rng(0).uniform(-1, 1, (3, 3)))
    exc = files["dir"] / "u.csv"
    exc.write_text(dump_excitation(plan))
    trace_path = files["dir"] / "y.csv"
    code, _ = run("simulate", "--network", files["dag"], "--excite", str(exc), "--horizon", "5", "--out", str(trace_path))
    assert code == 0
    trace = parse_trace(trace_path.read_text(), 3)
    assert trace.horizon == 5
    # rerun and compare: identical output
    code, out = run("simulate", "--network", files["dag"], "--excite", str(exc), "--horizon", "5")
    assert out == trace_path.read_text()
    code, _ = run("simulate", "--network", files["dag"], "--excite", str(exc), "--horizon", "2")
    assert code == 65


def test_simulate_zero_file(files):
    exc = files["dir"] / "zero.csv"
    exc.write_text("k,node,value\n")
    code, out = run("simulate", "--network", files["dag"], "--excite", str(exc), "--horizon", "3")
    assert code == 0
    assert np.all(parse_trace(out, 3).values == 0.0)


def test_unfold(files):
    dot = files["dir"] / "h.dot"
    code, out = run("unfold", "--network", files["six"], "--node", "3", "--k", "4", "--dot", str(dot))
    assert code == 0 and "copies: 9" in out and "edges: 9" in out
    assert dot.read_text().startswith("digraph H {")
    code, out = run("unfold", "--network", files["chain"], "--node", "2", "--k", "2")
    assert code == 0 and out.count("->") == 1
    assert run("unfold", "--network", files["six"], "--node", "3", "--k", "1")[0] == 65
    assert run("unfold", "--network", files["cross"], "--node", "2", "--k", "3")[0] == 65


def test_forge_and_verify(files):
    alt = str(files["dir"] / "alt.net")
    code, out = run("forge", "--network", files["dag"], "--mode", "gamma-split", "--node", "3", "--p", "1", "--q", "2",
                    "--gamma", "0.5", "--out", alt)
    assert code == 0
    assert parse_manifest((files["dir"] / "alt.net.manifest").read_text())["construction"] == "gamma-split"
    code, out = run("verify", "--network", files["dag"], "--alt", alt, "--measure", "all")
    assert code == 0 and out.startswith("PASS")

    # corrupt one coefficient by 1e-3
    net = load_network(alt)
    coeffs = net[(3, 2)].coeffs
    coeffs[(3,)] += 1e-3
    (files["dir"] / "bad.net").write_text(dump_network(net.replace({(3, 2): EdgeFunction(1, coeffs)})))
    code, out = run("verify", "--network", files["dag"], "--alt", str(files["dir"] / "bad.net"), "--measure", "3")
    assert code == 1 and out.startswith("FAIL node=3")


def test_forge_shift_and_linear(files):
    alt = str(files["dir"] / "s.net")
    code, _ = run("forge", "--network", files["chain"], "--mode", "shift", "--node", "2", "--gamma", "0.3", "--out", alt)
    assert code == 0
    assert run("verify", "--network", files["chain"], "--alt", alt, "--measure", "1,3")[0] == 0
    assert run("verify", "--network", files["chain"], "--alt", alt, "--measure", "2")[0] == 1
    bad = run("forge", "--network", files["dag"], "--mode", "shift", "--node", "2", "--gamma", "0.3", "--out", alt)
    assert bad[0] == 65
    lin = str(files["dir"] / "l.net")
    code, _ = run("forge", "--network", files["bridge"], "--mode", "linear", "--hub", "4", "--p", "2", "--q", "3",
                  "--delta", "2:0.2,3:0.1", "--out", lin)
    assert code == 0
    assert run("verify", "--network", files["bridge"], "--alt", lin, "--measure", "4")[0] == 0
    assert run("forge", "--network", files["dag"], "--mode", "gamma-split", "--out", lin)[0] == 65


def test_estimate(files, capsys):
    out_net = files["dir"] / "fit.net"
    code, out = run("estimate", "--topology", files["dag"], "--truth", files["dag"], "--plans", "60",
                    "--out", str(out_net), "--report", str(files["dir"] / "rep.csv"))
    assert code == 0 and "measured: 3" in out
    assert float(out.split("recovery_error:")[1]) <= 1e-6
    assert load_network(out_net).graph == example_dag().graph
    code, _ = run("estimate", "--topology", files["bridge"], "--truth", files["bridge"], "--class", "z",
                  "--measure", "4", "--plans", "60")
    assert code == 65
    err = capsys.readouterr().err
    assert "RankDeficient" in err and "[2<-1:" in err and "[3<-1:" in err
    code, _ = run("estimate", "--topology", files["dag"], "--truth", files["dag"], "--plans", "1")
    assert code == 65


def test_exit_codes_for_bad_files(files, capsys):
    broken = files["dir"] / "broken.net"
    broken.write_text("NETWORK n=2\nEDGE to=2 from=1 memory=1\nTERM coeff=x exps=2\n")
    assert run("analyze", "--network", str(broken), "--class", "znl")[0] == 64
    assert "line 3, column 6" in capsys.readouterr().err
    assert run("analyze", "--network", str(files["dir"] / "missing.net"), "--class", "znl")[0] == 66
