"""Node-level graph invariants.

Every function returns an :class:`InvariantValues` holding one float per
node. Integer-natured invariants (degree, core, onion, truss) are stored as
floats too; ranking decides how values group into levels.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Graph, GraphError, ParameterError, all_triangles


class DegenerateInputError(GraphError):
    pass


@dataclass
class InvariantValues:
    invariant_name: str
    values: np.ndarray
    graph_id: str = "g0"
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def is_integral(self) -> bool:
        return bool(np.all(np.equal(np.mod(self.values, 1.0), 0.0)))


def _wrap(name: str, g: Graph, values, graph_id: str, **params) -> InvariantValues:
    return InvariantValues(name, np.asarray(values, dtype=np.float64), graph_id, params)


def degree(g: Graph, graph_id: str = "g0") -> InvariantValues:
    return _wrap("degree", g, g.degrees(), graph_id)


def core_numbers(g: Graph) -> list[int]:
    """Core number per node by bucket-sorted peeling (Batagelj-Zaversnik)."""
    n = g.node_count
    if n == 0:
        return []
    deg = [len(a) for a in g.adjacency]
    maxd = max(deg)
    bins = [0] * (maxd + 1)
    for d in deg:
        bins[d] += 1
    start = 0
    for d in range(maxd + 1):
        bins[d], start = start, start + bins[d]
    pos = [0] * n
    order = [0] * n
    for v in range(n):
        pos[v] = bins[deg[v]]
        order[pos[v]] = v
        bins[deg[v]] += 1
    for d in range(maxd, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for i in range(n):
        v = order[i]
        for u in g.adjacency[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = order[pw]
                if u != w:
                    pos[u], pos[w] = pw, pu
                    order[pu], order[pw] = w, u
                bins[du] += 1
                deg[u] -= 1
    return deg


def k_core(g: Graph, graph_id: str = "g0") -> InvariantValues:
    return _wrap("core", g, core_numbers(g), graph_id)


def onion_layers(g: Graph) -> list[int]:
    """1-based onion layer per node.

    Each round removes every remaining node whose residual degree is at
    most the current core value; the core value only rises when a round
    would otherwise be empty. Isolated nodes form layer 1.
    """
    n = g.node_count
    deg = [len(a) for a in g.adjacency]
    layer = [0] * n
    removed = [False] * n
    maxd = max(deg, default=0)
    buckets: list[set[int]] = [set() for _ in range(maxd + 1)]
    for v in range(n):
        buckets[deg[v]].add(v)
    core = 0
    current = 1
    left = n
    while left:
        if not any(buckets[d] for d in range(min(core, maxd) + 1)):
            core += 1
            while not buckets[core]:
                core += 1
        shell = [v for d in range(core + 1) for v in buckets[d]]
        for d in range(core + 1):
            buckets[d].clear()
        for v in shell:
            removed[v] = True
            layer[v] = current
        left -= len(shell)
        for v in shell:
            for u in g.adjacency[v]:
                if not removed[u]:
                    buckets[deg[u]].discard(u)
                    deg[u] -= 1
                    buckets[deg[u]].add(u)
        current += 1
    return layer


def onion(g: Graph, graph_id: str = "g0") -> InvariantValues:
    return _wrap("onion", g, onion_layers(g), graph_id)


def _local_clustering(g: Graph, tris: list[list[tuple[int, int]]]) -> np.ndarray:
    out = np.zeros(g.node_count)
    for v in range(g.node_count):
        d = len(g.adjacency[v])
        if d >= 2:
            out[v] = 2.0 * len(tris[v]) / (d * (d - 1))
    return out


def clustering(g: Graph, graph_id: str = "g0") -> InvariantValues:
    return _wrap("clustering", g, _local_clustering(g, all_triangles(g)), graph_id)


def avg_neighborhood_clustering(g: Graph, graph_id: str = "g0") -> InvariantValues:
    cc = _local_clustering(g, all_triangles(g))
    out = np.zeros(g.node_count)
    for v in range(g.node_count):
        nb = g.adjacency[v]
        if nb:
            out[v] = sum(cc[u] for u in nb) / len(nb)
    return _wrap("anc", g, out, graph_id)


def edge_trussness(g: Graph) -> dict[tuple[int, int], int]:
    """Trussness per edge ``(u, v)``, ``u < v``, by support peeling.

    Edges are popped in order of current support; an edge removed while
    the running level is ``k`` gets trussness ``k + 2``.
    """
    nsets = [set(a) for a in g.adjacency]
    sup: dict[tuple[int, int], int] = {}
    for u, v in g.edges():
        sup[(u, v)] = len(nsets[u] & nsets[v])
    heap = [(s, e) for e, s in sup.items()]
    heapq.heapify(heap)
    truss: dict[tuple[int, int], int] = {}
    level = 0
    while heap:
        s, e = heapq.heappop(heap)
        if e in truss or s != sup[e]:
            continue
        level = max(level, s)
        truss[e] = level + 2
        u, v = e
        nsets[u].discard(v)
        nsets[v].discard(u)
        for w in nsets[u] & nsets[v]:
            for f in ((min(u, w), max(u, w)), (min(v, w), max(v, w))):
                sup[f] -= 1
                heapq.heappush(heap, (sup[f], f))
    return truss


def k_truss(g: Graph, graph_id: str = "g0") -> InvariantValues:
    out = np.zeros(g.node_count)
    for (u, v), t in edge_trussness(g).items():
        out[u] = max(out[u], t)
        out[v] = max(out[v], t)
    return _wrap("truss", g, out, graph_id)


def pagerank(
    g: Graph, damping: float = 0.85, iterations: int = 100, graph_id: str = "g0"
) -> InvariantValues:
    """Power-iteration PageRank with uniform teleport.

    Mass sitting on isolated nodes is spread uniformly each step.
    """
    if not 0.0 < damping < 1.0:
        raise ParameterError(f"damping must lie in (0, 1), got {damping}")
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")
    n = g.node_count
    if n == 0:
        return _wrap("pagerank", g, [], graph_id, damping=damping, iterations=iterations)
    deg = g.degrees().astype(np.float64)
    dangling = deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, deg))
    rows, cols = g.rows, g.indices
    x = np.full(n, 1.0 / n)
    for _ in range(iterations):
        share = x * inv
        nxt = np.bincount(cols, weights=share[rows], minlength=n)
        nxt = damping * (nxt + x[dangling].sum() / n) + (1.0 - damping) / n
        x = nxt
    x /= x.sum()
    return _wrap("pagerank", g, x, graph_id, damping=damping, iterations=iterations)


def eigenvector_centrality(
    g: Graph, iterations: int = 100, tolerance: float = 1e-9, graph_id: str = "g0"
) -> InvariantValues:
    """Principal eigenvector by power iteration, L2-normalized.

    Iterates with ``A + I`` (same eigenvectors as ``A``) so bipartite
    graphs converge instead of oscillating.
    """
    if g.edge_count == 0:
        raise DegenerateInputError("eigenvector centrality needs at least one edge")
    n = g.node_count
    rows, cols = g.rows, g.indices
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(iterations):
        nxt = x + np.bincount(rows, weights=x[cols], minlength=n)
        nxt /= np.linalg.norm(nxt)
        done = np.max(np.abs(nxt - x)) < tolerance
        x = nxt
        if done:
            break
    return _wrap(
        "eigenvector", g, np.abs(x), graph_id, iterations=iterations, tolerance=tolerance
    )


def betweenness_values(g: Graph) -> np.ndarray:
    """Unnormalized undirected betweenness (Brandes accumulation)."""
    n = g.node_count
    bc = np.zeros(n)
    adj = g.adjacency
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    q.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def betweenness(g: Graph, graph_id: str = "g0") -> InvariantValues:
    return _wrap("betweenness", g, betweenness_values(g), graph_id)


def _eigenvector_or_zero(g: Graph, graph_id: str = "g0") -> InvariantValues:
    if g.edge_count == 0:
        return _wrap("eigenvector", g, np.zeros(g.node_count), graph_id)
    return eigenvector_centrality(g, graph_id=graph_id)


# Registry keyed by the short names used on the command line. Eigenvector
# centrality maps edgeless graphs to all zeros here so batch runs keep going.
REGISTRY: dict[str, Callable[..., InvariantValues]] = {
    "degree": degree,
    "core": k_core,
    "onion": onion,
    "clustering": clustering,
    "anc": avg_neighborhood_clustering,
    "truss": k_truss,
    "pagerank": pagerank,
    "eigenvector": _eigenvector_or_zero,
    "betweenness": betweenness,
}

ALIASES = {
    "k_core": "core",
    "kcore": "core",
    "k_truss": "truss",
    "ktruss": "truss",
    "avg_neighborhood_clustering": "anc",
    "eigenvector_centrality": "eigenvector",
    "cc": "clustering",
}

# The seven variants shown in the Les Miserables colouring comparison.
CENSUS_INVARIANTS = ("degree", "core", "onion", "clustering", "truss", "pagerank", "eigenvector")


def canonical_name(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in REGISTRY:
        raise KeyError(name)
    return key


def compute(name: str, g: Graph, graph_id: str = "g0") -> InvariantValues:
    return REGISTRY[canonical_name(name)](g, graph_id=graph_id)
