"""Undirected simple graphs in sorted-adjacency form, plus I/O and generators.

Node ids are dense integers ``0..n-1``. Every adjacency row is a strictly
increasing tuple, which lets :func:`triangles` run as a merge intersection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for graph construction and parsing problems."""


class ParseError(GraphError):
    pass


class ParameterError(GraphError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    node_count: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int
    labels: tuple[str, ...] | None = None
    duplicates_collapsed: int = field(default=0, compare=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.node_count, self.adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "Graph":
        """Build a graph, collapsing duplicate edges and rejecting self-loops."""
        if node_count < 0:
            raise ParameterError(f"node_count must be non-negative, got {node_count}")
        nbrs: list[set[int]] = [set() for _ in range(node_count)]
        dupes = 0
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            if v in nbrs[u]:
                dupes += 1
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        m = sum(len(a) for a in adjacency) // 2
        return cls(node_count, adjacency, m, tuple(labels) if labels is not None else None, dupes)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u, row in enumerate(self.adjacency) for v in row if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def indptr(self) -> np.ndarray:
        ptr = np.zeros(self.node_count + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        return ptr

    @cached_property
    def indices(self) -> np.ndarray:
        if self.node_count == 0:
            return np.zeros(0, dtype=np.int64)
        return np.fromiter(
            (u for row in self.adjacency for u in row), dtype=np.int64, count=2 * self.edge_count
        )

    @cached_property
    def rows(self) -> np.ndarray:
        """Source node of every CSR entry (the row index expanded)."""
        return np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees())

    def check(self) -> None:
        """Assert the structural invariants; raises ``GraphError`` on violation."""
        total = 0
        for v, row in enumerate(self.adjacency):
            total += len(row)
            for a, b in zip(row, row[1:]):
                if a >= b:
                    raise GraphError(f"adjacency of {v} not strictly increasing")
            for u in row:
                if u == v:
                    raise GraphError(f"self-loop at node {v}")
                if v not in self.neighbor_sets[u]:
                    raise GraphError(f"asymmetric edge {v}->{u}")
        if total != 2 * self.edge_count:
            raise GraphError("edge_count does not match adjacency")


@dataclass(frozen=True)
class TriangleSet:
    center: int
    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)


# ---------------------------------------------------------------------------
# parsing


def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated edge pairs.

    ``#`` starts a comment line and ``n <count>`` declares a node count
    (useful for trailing isolated nodes). Tokens that are not all integers
    are interned as string labels in order of first appearance; the label
    table is kept on the returned graph.
    """
    pairs: list[tuple[str, str, int]] = []
    declared = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            try:
                declared = max(declared, int(parts[1]))
            except ValueError:
                raise ParseError(f"line {lineno}: bad node count {parts[1]!r}") from None
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two node ids, got {line!r}")
        pairs.append((parts[0], parts[1], lineno))

    numeric = all(_is_int(a) and _is_int(b) for a, b, _ in pairs)
    edges: list[tuple[int, int]] = []
    labels: list[str] | None = None
    if numeric:
        for a, b, lineno in pairs:
            u, v = int(a), int(b)
            if u < 0 or v < 0:
                raise ParseError(f"line {lineno}: negative node id")
            if u == v:
                raise ParseError(f"line {lineno}: self-loop at node {u}")
            edges.append((u, v))
        n = max([declared] + [max(u, v) + 1 for u, v in edges])
    else:
        table: dict[str, int] = {}
        labels = []
        for a, b, lineno in pairs:
            if a == b:
                raise ParseError(f"line {lineno}: self-loop at node {a}")
            ids = []
            for tok in (a, b):
                if tok not in table:
                    table[tok] = len(labels)
                    labels.append(tok)
                ids.append(table[tok])
            edges.append((ids[0], ids[1]))
        n = max(declared, len(labels))
        labels += [str(i) for i in range(len(labels), n)]
    return Graph.from_edges(n, edges, labels)


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.node_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


_G6_HEADER = b">>graph6<<"


def parse_graph6(data: bytes | str) -> Graph:
    """Decode one graph6 line (header and trailing newline allowed)."""
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(_G6_HEADER):
        data = data[len(_G6_HEADER):]
    if not data:
        raise ParseError("empty graph6 string")
    for i, b in enumerate(data):
        if not 63 <= b <= 126:
            raise ParseError(f"graph6 byte {i} out of range: {b}")
    vals = [b - 63 for b in data]
    if vals[0] < 63:
        n, pos = vals[0], 1
    elif len(vals) >= 4 and vals[1] < 63:
        n, pos = (vals[1] << 12) | (vals[2] << 6) | vals[3], 4
    elif len(vals) >= 8:
        n = 0
        for x in vals[2:8]:
            n = (n << 6) | x
        pos = 8
    else:
        raise ParseError("truncated graph6 size field")
    nbits = n * (n - 1) // 2
    payload = vals[pos:]
    if len(payload) != (nbits + 5) // 6:
        raise ParseError(
            f"graph6 payload has {len(payload)} bytes, expected {(nbits + 5) // 6} for n={n}"
        )
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (payload[k // 6] >> (5 - k % 6)) & 1:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def format_graph6(g: Graph) -> bytes:
    n = g.node_count
    if n < 63:
        out = [n]
    elif n <= 258047:
        out = [63, (n >> 12) & 63, (n >> 6) & 63, n & 63]
    else:
        out = [63, 63] + [(n >> s) & 63 for s in (30, 24, 18, 12, 6, 0)]
    acc = nb = 0
    for j in range(1, n):
        nset = g.neighbor_sets[j]
        for i in range(j):
            acc = (acc << 1) | (i in nset)
            nb += 1
            if nb == 6:
                out.append(acc)
                acc = nb = 0
    if nb:
        out.append(acc << (6 - nb))
    return bytes(x + 63 for x in out)


def read_graph(path: str) -> Graph:
    """Load a graph file; ``.g6``/``.graph6`` is graph6, anything else an edge list."""
    if path.endswith((".g6", ".graph6")):
        with open(path, "rb") as fh:
            line = fh.readline()
        return parse_graph6(line)
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


# ---------------------------------------------------------------------------
# triangles


def triangles(g: Graph, v: int) -> TriangleSet:
    """Neighbor pairs ``{u, w}`` of ``v`` that are themselves adjacent."""
    if not 0 <= v < g.node_count:
        raise IndexError(f"node {v} out of range for {g.node_count} nodes")
    nv = g.adjacency[v]
    pairs = []
    for idx, u in enumerate(nv):
        # merge-intersect N(u) with the tail of N(v) past u
        nu = g.adjacency[u]
        i, j = 0, idx + 1
        while i < len(nu) and j < len(nv):
            a, b = nu[i], nv[j]
            if a < b:
                i += 1
            elif a > b:
                j += 1
            else:
                pairs.append((u, a))
                i += 1
                j += 1
    return TriangleSet(v, tuple(pairs))


def all_triangles(g: Graph) -> list[list[tuple[int, int]]]:
    """T(v) for every node at once, each list in canonical ``(u < w)`` order.

    Edges are oriented from lower to higher (degree, id) rank so each
    triangle is found once, in O(d |E|) for degeneracy d.
    """
    n = g.node_count
    deg = [len(a) for a in g.adjacency]
    rank = sorted(range(n), key=lambda x: (deg[x], x))
    pos = [0] * n
    for i, x in enumerate(rank):
        pos[x] = i
    fwd = [{u for u in g.adjacency[x] if pos[u] > pos[x]} for x in range(n)]
    out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for x in range(n):
        fx = fwd[x]
        for y in fx:
            for z in fx & fwd[y]:
                a, b, c = sorted((x, y, z))
                out[a].append((b, c))
                out[b].append((a, c))
                out[c].append((a, b))
    for lst in out:
        lst.sort()
    return out


def triangle_count(g: Graph) -> int:
    return sum(len(t) for t in all_triangles(g)) // 3


# ---------------------------------------------------------------------------
# permutations


def apply_permutation(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel node ``v`` as ``perm[v]``."""
    perm = list(perm)
    if len(perm) != g.node_count:
        raise ParameterError(f"permutation length {len(perm)} != node_count {g.node_count}")
    if sorted(perm) != list(range(g.node_count)):
        raise ParameterError("permutation is not a bijection on 0..n-1")
    labels = None
    if g.labels is not None:
        lab = [""] * g.node_count
        for v, p in enumerate(perm):
            lab[p] = g.labels[v]
        labels = lab
    return Graph.from_edges(g.node_count, ((perm[u], perm[v]) for u, v in g.edges()), labels)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for v, p in enumerate(perm):
        inv[p] = v
    return inv


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


# ---------------------------------------------------------------------------
# generators
#
# All randomness goes through ``random.Random`` (MT19937, seeded from the
# integer seed), whose output sequence is fixed across platforms.


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert graph grown from a clique on ``m`` nodes.

    Each new node links to ``m`` distinct targets drawn uniformly from the
    endpoint pool, so selection probability is proportional to degree.
    """
    if m < 1 or n <= m:
        raise ParameterError(f"need n > m >= 1, got n={n}, m={m}")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    pool: list[int] = [x for e in edges for x in e] or list(range(m))
    for new in range(m, n):
        targets: list[int] = []
        seen: set[int] = set()
        while len(targets) < m:
            t = pool[rng.randrange(len(pool))]
            if t not in seen:
                seen.add(t)
                targets.append(t)
        for t in targets:
            edges.append((t, new))
            pool.append(t)
        pool.extend([new] * m)
    return Graph.from_edges(n, edges)


def generate_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p) random graph."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ParameterError(f"bad G(n,p) parameters n={n}, p={p}")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


NAMED_FAMILIES = ("cycle", "clique", "disjoint_cliques", "path", "star")


def generate_named(family: str, *params: int) -> Graph:
    """Canonical small families.

    ``cycle(n)``, ``clique(n)``, ``path(n)`` take a node count; ``star(k)``
    has ``k`` leaves around center 0; ``disjoint_cliques(count, size)``.
    """
    if family not in NAMED_FAMILIES:
        raise ParameterError(f"unknown family {family!r}; expected one of {NAMED_FAMILIES}")
    expected = 2 if family == "disjoint_cliques" else 1
    if len(params) != expected:
        raise ParameterError(f"{family} takes {expected} parameter(s), got {len(params)}")
    if any(int(p) <= 0 for p in params):
        raise ParameterError(f"{family} parameters must be positive, got {params}")
    if family == "cycle":
        (n,) = params
        if n < 3:
            raise ParameterError("cycle needs at least 3 nodes")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if family == "clique":
        (n,) = params
        return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if family == "path":
        (n,) = params
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if family == "star":
        (k,) = params
        return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])
    count, size = params
    edges = []
    for c in range(count):
        base = c * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
    return Graph.from_edges(count * size, edges)


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    edges = []
    off = 0
    for g in graphs:
        edges += [(u + off, v + off) for u, v in g.edges()]
        off += g.node_count
    return Graph.from_edges(off, edges)
