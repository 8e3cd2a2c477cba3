import random

import pytest

from conftest import random_corpus
from ispwl import invariants as inv
from ispwl import les_miserables
from ispwl.distinguish import (
    corpus_eval,
    distinguish_nodes,
    distinguish_pair,
    parse_method,
    read_manifest,
    refinement_census,
)
from ispwl.graph import (
    ParameterError,
    apply_permutation,
    format_edge_list,
    generate_ba,
    generate_named,
    random_permutation,
)
from ispwl.refine import run_1wl


def test_parse_method():
    assert parse_method("1wl") == ("1wl", None)
    assert parse_method("isp:k_core") == ("isp", "core")
    assert parse_method("isp", "truss") == ("isp", "truss")
    with pytest.raises(ParameterError):
        parse_method("isp")
    with pytest.raises(ParameterError):
        parse_method("3wl")


def test_pair_examples(c6, two_k3):
    rep = distinguish_pair(c6, two_k3, "1wl")
    assert not rep.distinguished and rep.first_separating_iteration is None
    rep = distinguish_pair(c6, two_k3, "isp", "degree")
    assert rep.distinguished
    assert 1 <= rep.first_separating_iteration <= rep.iterations_run
    g = generate_ba(40, 2, 4)
    h = apply_permutation(g, random_permutation(40, random.Random(1)))
    for name in inv.REGISTRY:
        assert not distinguish_pair(g, h, "isp", name).distinguished


def test_first_separating_iteration(c6, two_k3):
    # ISP colors are written at iteration 1 (one stratum) and only the
    # combined coloring differs there
    rep = distinguish_pair(c6, two_k3, "isp", "degree")
    assert rep.first_separating_iteration == 1
    rep = distinguish_pair(generate_named("path", 4), generate_named("star", 3), "1wl")
    assert rep.distinguished and rep.first_separating_iteration == 1


def test_node_examples(c6, two_k3):
    for u in range(6):
        for v in range(6):
            assert not distinguish_nodes(c6, u, two_k3, v, "1wl")
            assert distinguish_nodes(c6, u, two_k3, v, "isp", "degree")
    assert not distinguish_nodes(c6, 2, c6, 2, "isp", "degree")
    with pytest.raises(IndexError):
        distinguish_nodes(c6, 6, two_k3, 0, "1wl")


def test_corpus_eval(c6, two_k3):
    rng = random.Random(2)
    pairs = []
    for i in range(10):
        g = generate_ba(30, 2, i)
        pairs.append((g, apply_permutation(g, random_permutation(30, rng))))
    s = corpus_eval(pairs, ["1wl", "isp:degree", "isp:core"])
    assert s.accuracy == {"1wl": 0.0, "isp:degree": 0.0, "isp:core": 0.0}
    assert s.pair_count == 10 and len(s.reports) == 30
    s = corpus_eval([(c6, two_k3)], ["1wl", "isp:degree"])
    assert s.accuracy == {"1wl": 0.0, "isp:degree": 1.0}
    with pytest.raises(ParameterError):
        corpus_eval([], ["1wl"])


def test_corpus_records_bad_pairs(tmp_path, c6, two_k3):
    (tmp_path / "a.edges").write_text(format_edge_list(c6))
    (tmp_path / "b.edges").write_text(format_edge_list(two_k3))
    (tmp_path / "bad.edges").write_text("0 0\n")
    man = tmp_path / "m.txt"
    man.write_text("a.edges b.edges\n# comment\na.edges bad.edges\na.edges missing.edges\n")
    s = corpus_eval(read_manifest(str(man)), ["isp:degree"])
    assert s.pair_count == 1 and len(s.errors) == 2
    assert s.accuracy["isp:degree"] == 1.0


def test_monotone_expressivity():
    graphs = random_corpus(16, 13, max_n=30, min_n=6)
    for g1, g2 in zip(graphs[::2], graphs[1::2]):
        if not distinguish_pair(g1, g2, "1wl").distinguished:
            continue
        for name in inv.REGISTRY:
            assert distinguish_pair(g1, g2, "isp", name).distinguished


def test_census():
    c = refinement_census(generate_named("clique", 4), inv.CENSUS_INVARIANTS)
    assert set(c.values()) == {1} and len(c) == 8
    g = les_miserables()
    c = refinement_census(g, ["degree", "truss"])
    assert c["1wl"] == run_1wl(g)[0].distinct == 52
    assert all(v >= 52 for v in c.values())
