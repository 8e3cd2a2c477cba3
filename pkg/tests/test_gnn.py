import random

import numpy as np
import pytest

from conftest import k3_pendant, random_corpus
from ispwl import invariants as inv
from ispwl.gnn import (
    FixedMlp,
    MlpBundle,
    SoftMembership,
    attention,
    discretize,
    embed,
    forward,
    gap_features,
    hard_gate,
    hard_isp_update,
    learnable_invariant_forward,
    soft_isp_update,
    soft_membership,
)
from ispwl.graph import apply_permutation, generate_ba, generate_named, random_permutation
from ispwl.stratify import RankedInvariant, gap_triple, global_rank


def test_gap_features():
    phi = [3.0, 1.0, 2.0]
    assert gap_features(phi, 0, 1, 2).tolist() == [2.0, 1.0, 1.0]
    assert gap_features([5.0, 5.0, 5.0], 0, 1, 2).tolist() == [0.0, 0.0, 0.0]
    ranked = RankedInvariant.single([1, 3, 3])
    assert gap_features(ranked.ranks[0], 0, 1, 2).tolist() == list(map(float, gap_triple(ranked, 0, 1, 2)))


def test_attention():
    zero = FixedMlp.zeros((3, 4, 1), ("relu", "sigmoid"))
    assert attention(zero, [1.0, -2.0, 7.0]) == 0.5
    m = FixedMlp.init((3, 16, 1), ("relu", "sigmoid"), seed=7)
    d = gap_features([3.0, 1.0, 2.0], 0, 1, 2)
    assert attention(m, d) == attention(m, gap_features([3.0, 1.0, 2.0], 0, 2, 1))
    assert attention(m, [2.0, 1.0, 1.0]) == pytest.approx(0.3974063878560178, abs=1e-12)
    assert attention(m, [0.0, -1.0, 1.0]) == pytest.approx(0.49723732952879457, abs=1e-12)
    with pytest.raises(ValueError):
        attention(FixedMlp.zeros((3, 1), ("relu",)), [0, 0, 0])


def test_fixed_mlp_deterministic():
    a = FixedMlp.init((5, 7, 2), ("relu", "sigmoid"), seed=11)
    b = FixedMlp.init((5, 7, 2), ("relu", "sigmoid"), seed=11)
    x = np.linspace(-3, 3, 10).reshape(2, 5)
    assert np.array_equal(a(x), b(x))
    out = a(x)
    assert np.all((out > 0) & (out < 1))
    with pytest.raises(ValueError):
        a(np.zeros((1, 4)))


def test_hard_gate():
    phi = RankedInvariant.single([3])
    assert hard_gate(phi, 0, 3, 0.0) == 1
    assert hard_gate(phi, 0, 4, 1.5) == 0
    assert hard_gate(phi, 0, 3, 1.5) == 0


def test_embed_distinct():
    vecs = {tuple(embed(k, 8)) for k in range(1, 200)}
    assert len(vecs) == 199
    assert all(np.any(embed(k, 8) != 0) for k in range(1, 50))


def _run(g, name="degree", depth=8, agg="sum", seed=0, feats=None):
    phi = global_rank([inv.compute(name, g)])
    x = np.ones((g.node_count, 3)) if feats is None else feats
    b = MlpBundle.build(x.shape[1], depth, seed=seed)
    return forward(g, x, phi, depth, b, agg), phi


def test_forward_k4_symmetric():
    for depth in (1, 4, 12):
        res, _ = _run(generate_named("clique", 4), depth=depth)
        assert np.allclose(res.output, res.output[0], atol=1e-12)


def test_forward_c6_embed_branch():
    g = generate_named("cycle", 6)
    for name in ("degree", "pagerank", "betweenness"):
        res, phi = _run(g, name)
        last = res.trace[-1]
        for v in range(6):
            assert np.array_equal(last.h_isp[v], embed(int(phi.ranks[0][v]), 8))


def test_forward_k3_pendant_golden():
    g = k3_pendant()
    phi = global_rank([inv.degree(g)])
    res = forward(g, np.ones((4, 2)), phi, 8, MlpBundle.build(2, 8, seed=3))
    # pendant has rank 1 and no triangles
    for s in res.trace:
        assert np.array_equal(s.h_isp[3], embed(1, 8))
    hub = [-8.812735289897752e-05, -0.1580375755937966, -0.07678985069266851,
           -0.21573849637903147, -0.08837367855156915, -0.023990979496787575,
           0.15085723465055859, 0.04411093030033633]
    assert np.allclose(res.trace[2].h_isp[0], hub, atol=1e-12, rtol=0)
    out0 = [0.6550684348119904, 0.9754487370794578, -2.6020334078967733, 0.9245591996879812,
            -2.0210274089475133, 1.2798639094620843, -1.3399647160471186, 0.7612588641202754]
    assert np.allclose(res.output[0], out0, atol=1e-10, rtol=0)
    assert res.gate_counts().tolist() == [1, 1, 1, 1]


def test_forward_unassigned_stay_zero():
    g = generate_ba(60, 3, 2)
    res, phi = _run(g, "degree", depth=4)
    ranks = phi.ranks[0]
    for s in res.trace:
        assert np.all(s.h_isp[ranks > s.k] == 0.0)
        assert np.array_equal(s.assigned, ranks <= s.k)
    counts = res.gate_counts()
    assert np.array_equal(counts, (ranks <= 4).astype(int))


@pytest.mark.parametrize("agg", ["sum", "mean"])
def test_forward_permutation_equivariance(agg):
    rng = random.Random(8)
    for g in random_corpus(6, 19, max_n=60, min_n=8):
        x = np.random.default_rng(1).normal(size=(g.node_count, 3))
        perm = random_permutation(g.node_count, rng)
        h = apply_permutation(g, perm)
        xp = np.empty_like(x)
        xp[perm] = x
        a, _ = _run(g, "core", depth=6, agg=agg, feats=x)
        b, _ = _run(h, "core", depth=6, agg=agg, feats=xp)
        assert np.allclose(b.output[perm], a.output, atol=1e-6)


def test_forward_errors():
    g = generate_named("cycle", 5)
    phi = global_rank([inv.degree(g)])
    b = MlpBundle.build(3, 2)
    with pytest.raises(ValueError):
        forward(g, np.ones((5, 4)), phi, 2, b)
    with pytest.raises(ValueError):
        forward(g, np.ones((5, 3)), phi, 3, b)
    with pytest.raises(ValueError):
        forward(g, np.ones((5, 3)), phi, 0, b)


def test_trace_json():
    res, _ = _run(k3_pendant(), depth=3)
    js = res.trace_json()
    assert len(js["layers"]) == 3 and js["layers"][0]["gate"] == [0, 0, 0, 1]
    assert "h_isp" in res.trace_json(full=True)["layers"][0]


def test_soft_membership():
    m = soft_membership([2.0], beta=0.7, S=4)
    assert np.argmax(m.weights[0]) == 1
    assert m.weights[0, 1] > max(m.weights[0, [0, 2, 3]])
    m = soft_membership([2.3], beta=100.0, S=4)
    assert m.weights[0, 1] >= 0.999
    assert soft_membership([1.4], 3.0, 1).weights.tolist() == [[1.0]]
    w = soft_membership(np.linspace(1, 5, 40), 2.5, 5).weights
    assert np.allclose(w.sum(axis=1), 1.0, atol=1e-9) and np.all(w >= 0)
    with pytest.raises(ValueError):
        soft_membership([1.0], 0.0, 3)


def test_learnable_invariant():
    zero = FixedMlp.zeros((3, 4, 1), ("relu", "sigmoid"))
    base = np.random.default_rng(0).normal(size=(6, 3))
    assert np.all(learnable_invariant_forward(base, zero, 5) == 3.0)
    mlp = FixedMlp.init((3, 8, 1), ("relu", "sigmoid"), seed=2)
    base[4] = base[1]
    out = learnable_invariant_forward(base, mlp, 5)
    assert out[4] == out[1]
    assert np.all((out > 1) & (out < 5))
    perm = np.random.default_rng(1).permutation(6)
    assert np.array_equal(learnable_invariant_forward(base[perm], mlp, 5), out[perm])


def test_discretize():
    p = [1.2, 1.5, 2.5, 2.51, 4.9]
    assert discretize(p, 4).tolist() == [1, 2, 2, 3, 4]
    assert discretize(p, 4, "floor").tolist() == [1, 1, 2, 2, 4]


def test_soft_isp_update_examples():
    tri = np.random.default_rng(3).normal(size=(4, 2, 5))
    onehot = SoftMembership(np.array([[0, 0, 1.0, 0], [1.0, 0, 0, 0]]), 1.0, 4, np.zeros(2))
    out = soft_isp_update(tri, onehot, 4)
    assert np.array_equal(out[0], tri[2, 0]) and np.array_equal(out[1], tri[0, 1])
    assert np.array_equal(out, hard_isp_update(tri, [3, 1], 4))
    assert np.all(soft_isp_update(np.zeros((4, 2, 5)), onehot, 4) == 0)
    uniform = SoftMembership(np.array([[0.5, 0.5]] * 2), 1.0, 2, np.zeros(2))
    assert np.allclose(soft_isp_update(tri[:2], uniform, 2), tri[:2].mean(axis=0))
