import csv
import json
import random
import subprocess
import sys
from importlib import resources

import pytest

from ispwl.cli import main
from ispwl.graph import apply_permutation, format_edge_list, generate_ba, random_permutation

LESMIS = str(resources.files("ispwl").joinpath("data/lesmis.edges"))


def read_rows(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.fixture
def files(tmp_path):
    assert main(["gen", "cycle", "6", "-o", str(tmp_path / "c6.edges")]) == 0
    assert main(["gen", "disjoint_cliques", "2", "3", "-o", str(tmp_path / "two_k3.edges")]) == 0
    assert main(["gen", "clique", "4", "-o", str(tmp_path / "k4.edges")]) == 0
    assert main(["gen", "star", "4", "-o", str(tmp_path / "star4.edges")]) == 0
    g = generate_ba(50, 3, 1)
    (tmp_path / "g.edges").write_text(format_edge_list(g))
    h = apply_permutation(g, random_permutation(50, random.Random(0)))
    (tmp_path / "g_perm.edges").write_text(format_edge_list(h))
    return tmp_path


def test_gen(files, tmp_path):
    lines = (files / "c6.edges").read_text().splitlines()
    assert len([ln for ln in lines if not ln.startswith("n ")]) == 6
    a, b = tmp_path / "a.edges", tmp_path / "b.edges"
    for p in (a, b):
        assert main(["gen", "ba", "--n", "1000", "--m", "5", "--seed", "1", "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "clique", "0"]) == 2


def test_color(files):
    out = files / "o"
    assert main(["color", "--graph", LESMIS, "--invariant", "degree", "--out", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["wl_distinct"] >= 1 and s["isp_distinct"] >= s["wl_distinct"]
    assert s["config"]["command"] == "color" and "version" in s
    rows = read_rows(out / "coloring.csv")
    assert len(rows) == 77 and set(rows[0]) == {
        "graph_id", "node_id", "wl_color", "isp_color", "final_color"}
    out2 = files / "o2"
    args = ["color", "--graph", str(files / "k4.edges"), "--invariant", "core", "--method", "1wl"]
    assert main(args + ["--out", str(out2)]) == 0
    assert json.loads((out2 / "summary.json").read_text())["wl_distinct"] == 1
    assert main(["color", "--graph", str(files / "missing.edges")]) == 2


def test_color_reproducible(files):
    a, b = files / "ra", files / "rb"
    for o in (a, b):
        main(["color", "--graph", str(files / "g.edges"), "--invariant", "truss", "--out", str(o)])
    assert (a / "coloring.csv").read_bytes() == (b / "coloring.csv").read_bytes()


def test_compare_pair(files, capsys):
    out = files / "cmp"
    assert main(["compare", str(files / "c6.edges"), str(files / "two_k3.edges"),
                 "--invariant", "degree", "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["distinguished"] is True
    rep = json.loads((out / "summary.json").read_text())["report"]
    assert rep["distinguished"] is True
    assert main(["compare", str(files / "g.edges"), str(files / "g_perm.edges"),
                 "--invariant", "truss", "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["distinguished"] is False


def test_compare_manifest(files):
    man = files / "pairs.txt"
    man.write_text("c6.edges two_k3.edges\ng.edges g_perm.edges\n")
    out = files / "man"
    assert main(["compare", "--manifest", str(man), "--methods", "1wl,isp:degree,isp:core",
                 "--out", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert set(s["accuracy"]) == {"1wl", "isp:degree", "isp:core"}
    assert s["accuracy"]["1wl"] == 0.0 and s["accuracy"]["isp:degree"] == 0.5
    assert len(read_rows(out / "pairs.csv")) == 6
    man.write_text("c6.edges nope.edges\n")
    assert main(["compare", "--manifest", str(man), "--methods", "1wl", "--out", str(out)]) == 2


def test_invariants(files):
    out = files / "inv"
    assert main(["invariants", "--graph", str(files / "star4.edges"),
                 "--list", "degree,betweenness", "--out", str(out)]) == 0
    rows = read_rows(out / "invariant_betweenness.csv")
    # star(4): C(4,2) = 6 leaf pairs route through the center
    assert float(rows[0]["value"]) == 6.0
    assert (out / "invariant_degree.csv").exists() and (out / "phi_degree.csv").exists()
    header = (out / "invariant_betweenness.csv").read_text().splitlines()[0]
    assert header.startswith("# invariant=betweenness")
    assert main(["invariants", "--graph", str(files / "k4.edges"), "--list", "core",
                 "--out", str(out)]) == 0
    assert {r["value"] for r in read_rows(out / "invariant_core.csv")} == {"3.0"}
    assert main(["invariants", "--list", "nosuch"]) == 4


def test_bad_flags(files):
    assert main(["color", "--graph", str(files / "k4.edges"), "--invariant", "nosuch"]) == 4
    with pytest.raises(SystemExit) as exc:
        main(["color", "--bogus"])
    assert exc.value.code == 4


def test_bench_small(files):
    out = files / "bench"
    assert main(["bench", "--sizes", "500,1000,2000", "--invariants", "degree",
                 "--out", str(out)]) == 0
    rows = read_rows(out / "bench.csv")
    assert len([r for r in rows if r["method"] == "isp:degree"]) == 3
    assert all(r["slope"] for r in rows)
    js = json.loads((out / "bench.json").read_text())
    assert "triangles" in js["loglog_slopes"]
    assert main(["bench", "--sizes", "", "--out", str(out)]) == 2


def test_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "ispwl.cli", "compare",
                           str(files / "c6.edges"), str(files / "two_k3.edges"), "--method", "1wl",
                           "--out", str(files / "ep")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["distinguished"] is False
