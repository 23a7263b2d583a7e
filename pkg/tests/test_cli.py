import json

import numpy as np
import pytest

from navgraph import dataset
from navgraph.cli import main


def run(argv):
    return main([str(a) for a in argv])


def test_gen_build_verify_route_roundtrip(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    graph = tmp_path / "g.edges"
    report = tmp_path / "r.json"
    assert run(["gen", "--kind", "uniform", "--n", 48, "--dim", "2", "--seed", "3", "--out", pts]) == 0
    assert run([
        "build", "--input", pts, "--algo", "full", "--seed", "7",
        "--out", graph, "--report", report,
    ]) == 0
    rep = json.loads(report.read_text())
    assert rep["n"] == 48 and rep["edges"] > 0
    assert run(["verify", "--input", pts, "--graph", graph, "--property", "nav"]) == 0
    assert run(["route", "--input", pts, "--graph", graph, "--start", "0", "--query", "17"]) == 0
    out = capsys.readouterr().out
    path = out.strip().splitlines()[-1].split()
    assert path[0] == "0" and path[-1] == "17"


def test_verify_fails_on_bad_graph(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    graph = tmp_path / "g.edges"
    run(["gen", "--kind", "uniform", "--n", 16, "--out", pts])
    graph.write_text("0 1\n")  # nowhere near navigable
    capsys.readouterr()
    assert run(["verify", "--input", pts, "--graph", graph]) == 1
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(len(l.split()) == 2 for l in lines)


def test_build_alpha_tau_cli(tmp_path):
    pts = tmp_path / "pts.csv"
    run(["gen", "--kind", "clusters", "--n", 32, "--seed", "1", "--out", pts])
    for algo, prop, extra in [
        ("alpha", "alpha", ["--alpha", "1.5"]),
        ("tau", "tau", ["--tau", "0.05"]),
    ]:
        graph = tmp_path / f"{algo}.edges"
        assert run(["build", "--input", pts, "--algo", algo, *extra, "--seed", "2", "--out", graph]) == 0
        assert run(["verify", "--input", pts, "--graph", graph, "--property", prop, *extra]) == 0


def test_matrix_metric_pipeline(tmp_path):
    mat = tmp_path / "m.ngdm"
    graph = tmp_path / "g.edges"
    assert run([
        "gen", "--kind", "covering-general", "--elements", "6", "--opt", "2",
        "--sets-count", "4", "--solutions", "2", "--seed", "5", "--out", mat,
    ]) == 0
    assert run([
        "build", "--input", mat, "--metric", "matrix", "--algo", "greedy", "--out", graph,
    ]) == 0
    assert run(["verify", "--input", mat, "--metric", "matrix", "--graph", graph]) == 0


def test_setcover_cli(tmp_path, capsys):
    inst = tmp_path / "inst.txt"
    assert run([
        "gen", "--kind", "planted-cover", "--elements", "30", "--opt", "3",
        "--sets-count", "10", "--seed", "2", "--out", inst,
    ]) == 0
    for algo in ("greedy", "vote", "limited", "lazy"):
        assert run(["setcover", "--instance", inst, "--algo", algo, "--seed", "1"]) == 0
    capsys.readouterr()
    # an impossible stop-early budget must fail loudly
    assert run(["setcover", "--instance", inst, "--algo", "vote", "--seed", "1", "--budget", "1"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_exit_code_2_on_bad_input(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert run(["build", "--input", missing, "--algo", "simple", "--out", tmp_path / "g"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,2.0\noops\n")
    assert run(["build", "--input", bad, "--algo", "simple", "--out", tmp_path / "g"]) == 2
    capsys.readouterr()


def test_bench_cli(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert run([
        "bench", "--algos", "clique,simple", "--sizes", "32,64", "--seeds", "2",
        "--family", "uniform", "--dim", "2", "--out", out, "--fit-slope",
    ]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0].startswith("algo,n,dim,metric,seed,edges")
    assert len(rows) == 1 + 2 * 2 * 2
    assert all(r.endswith("True") for r in rows[1:])


def test_build_determinism_via_cli(tmp_path):
    pts = tmp_path / "pts.csv"
    run(["gen", "--kind", "uniform", "--n", 40, "--seed", "9", "--out", pts])
    graphs = []
    reports = []
    for t in range(2):
        g = tmp_path / f"g{t}.edges"
        r = tmp_path / f"r{t}.json"
        assert run(["build", "--input", pts, "--algo", "full", "--seed", "4", "--out", g, "--report", r]) == 0
        graphs.append(g.read_bytes())
        rep = json.loads(r.read_text())
        rep.pop("wall_ms")
        reports.append(rep)
    assert graphs[0] == graphs[1]
    assert reports[0] == reports[1]
