"""Forward-only ISP-GNN layer with fixed, seeded weights.

Nothing here trains. Weights come from numpy's PCG64 generator, seeded
through ``SeedSequence``, with Glorot-uniform bounds, so traces are
reproducible bit for bit on one platform and are used to check gating,
single assignment and depth behaviour of the ISP stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import Graph, all_triangles
from .stratify import RankedInvariant


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


ACTIVATIONS = {
    "identity": lambda x: x,
    "relu": lambda x: np.maximum(x, 0.0),
    "sigmoid": _sigmoid,
}


@dataclass
class FixedMlp:
    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activations: tuple[str, ...]
    seed: int | None = None

    @classmethod
    def init(cls, sizes: Sequence[int], activations: Sequence[str], seed: int) -> "FixedMlp":
        sizes = tuple(int(s) for s in sizes)
        if len(activations) != len(sizes) - 1:
            raise ValueError("need one activation per layer")
        rng = np.random.Generator(np.random.PCG64(seed))
        ws, bs = [], []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            a = np.sqrt(6.0 / (fan_in + fan_out))
            ws.append(rng.uniform(-a, a, size=(fan_in, fan_out)))
            bs.append(rng.uniform(-a, a, size=fan_out))
        return cls(sizes, ws, bs, tuple(activations), seed)

    @classmethod
    def zeros(cls, sizes: Sequence[int], activations: Sequence[str]) -> "FixedMlp":
        sizes = tuple(int(s) for s in sizes)
        ws = [np.zeros((i, o)) for i, o in zip(sizes, sizes[1:])]
        bs = [np.zeros(o) for o in sizes[1:]]
        return cls(sizes, ws, bs, tuple(activations), None)

    @property
    def in_dim(self) -> int:
        return self.sizes[0]

    @property
    def out_dim(self) -> int:
        return self.sizes[-1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.in_dim:
            raise ValueError(f"input dimension {x.shape[-1]} != {self.in_dim}")
        for w, b, act in zip(self.weights, self.biases, self.activations):
            x = ACTIVATIONS[act](x @ w + b)
        return x


@dataclass
class MlpBundle:
    """The fixed networks one forward pass needs.

    ``upd`` holds one update layer per depth step; its input is the node's
    combined vector concatenated with the aggregated neighbor combined
    vectors.
    """

    struct: FixedMlp
    tri: FixedMlp
    upd: list[FixedMlp]
    out: FixedMlp
    in_dim: int
    hidden: int
    isp_dim: int

    @classmethod
    def build(
        cls,
        in_dim: int,
        depth: int,
        hidden: int = 16,
        isp_dim: int = 8,
        out_dim: int = 8,
        seed: int = 0,
    ) -> "MlpBundle":
        seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(depth + 3)]
        struct = FixedMlp.init((3, hidden, 1), ("relu", "sigmoid"), seeds[0])
        tri = FixedMlp.init((isp_dim, hidden, isp_dim), ("relu", "identity"), seeds[1])
        out = FixedMlp.init((hidden + isp_dim, out_dim), ("identity",), seeds[2])
        upd = []
        width = in_dim
        for k in range(depth):
            upd.append(FixedMlp.init((2 * (width + isp_dim), hidden), ("relu",), seeds[3 + k]))
            width = hidden
        return cls(struct, tri, upd, out, in_dim, hidden, isp_dim)


@dataclass
class LayerState:
    k: int
    h_wl: np.ndarray
    h_isp: np.ndarray
    h_tri: np.ndarray
    gate: np.ndarray
    assigned: np.ndarray


@dataclass
class ForwardResult:
    output: np.ndarray
    trace: list[LayerState]
    strata: np.ndarray

    def gate_counts(self) -> np.ndarray:
        return np.sum([s.gate for s in self.trace], axis=0)

    def trace_json(self, full: bool = False) -> dict:
        layers = []
        for s in self.trace:
            entry = {
                "k": s.k,
                "wl_norm": np.linalg.norm(s.h_wl, axis=1).tolist(),
                "isp_norm": np.linalg.norm(s.h_isp, axis=1).tolist(),
                "gate": s.gate.astype(int).tolist(),
                "assigned": s.assigned.astype(int).tolist(),
            }
            if full:
                entry["h_wl"] = s.h_wl.tolist()
                entry["h_isp"] = s.h_isp.tolist()
            layers.append(entry)
        return {"strata": self.strata.tolist(), "layers": layers}

    def dumps(self, full: bool = False) -> str:
        return json.dumps(self.trace_json(full))


def gap_features(phi_values, v: int, u: int, w: int) -> np.ndarray:
    pv, pu, pw = float(phi_values[v]), float(phi_values[u]), float(phi_values[w])
    a, b = pv - pu, pv - pw
    return np.array([max(a, b), min(a, b), abs(pu - pw)])


def _gap_matrix(pv, pu, pw):
    a, b = pv - pu, pv - pw
    return np.stack([np.maximum(a, b), np.minimum(a, b), np.abs(pu - pw)], axis=-1)


def attention(mlp: FixedMlp, d) -> float:
    if mlp.activations[-1] != "sigmoid" or mlp.out_dim != 1:
        raise ValueError("attention MLP must end in a single sigmoid unit")
    return float(mlp(np.asarray(d, dtype=np.float64))[0])


def hard_gate(phi, v: int, k: int, isp_norm: float, graph: int = 0) -> int:
    rank = phi.phi(v, graph) if isinstance(phi, RankedInvariant) else int(phi[v])
    return int(rank == k and isp_norm == 0)


def embed(k: int, dim: int) -> np.ndarray:
    """Sinusoidal encoding of layer index ``k``."""
    i = np.arange(dim)
    freq = 1.0 / np.power(10000.0, (2 * (i // 2)) / dim)
    ang = k * freq
    return np.where(i % 2 == 0, np.sin(ang), np.cos(ang))


def _ranks_of(phi, graph: int) -> np.ndarray:
    if isinstance(phi, RankedInvariant):
        return np.asarray(phi.ranks[graph], dtype=np.int64)
    return np.asarray(phi, dtype=np.int64)


def forward(
    g: Graph,
    features: np.ndarray,
    phi,
    depth: int,
    mlps: MlpBundle,
    agg: str = "sum",
    gap_values=None,
    graph: int = 0,
) -> ForwardResult:
    """Run ``depth`` dual-stream layers.

    ``phi`` is a :class:`RankedInvariant` (or a plain rank array) and
    drives the hard gate. Gap features use ``gap_values`` when given
    (e.g. continuous learned invariants), the integer ranks otherwise.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if agg not in ("sum", "mean"):
        raise ValueError(f"unknown aggregation {agg!r}")
    if len(mlps.upd) < depth:
        raise ValueError(f"bundle has {len(mlps.upd)} update layers, depth is {depth}")
    x = np.asarray(features, dtype=np.float64)
    n = g.node_count
    if x.shape != (n, mlps.in_dim):
        raise ValueError(f"features have shape {x.shape}, expected {(n, mlps.in_dim)}")
    ranks = _ranks_of(phi, graph)
    gaps = ranks.astype(np.float64) if gap_values is None else np.asarray(gap_values, float)

    tris = all_triangles(g)
    tv = np.array([v for v in range(n) for _ in tris[v]], dtype=np.int64)
    tu = np.array([u for v in range(n) for u, _ in tris[v]], dtype=np.int64)
    tw = np.array([w for v in range(n) for _, w in tris[v]], dtype=np.int64)
    has_tri = np.array([bool(t) for t in tris], dtype=bool)
    alpha = mlps.struct(_gap_matrix(gaps[tv], gaps[tu], gaps[tw]))[:, 0] if len(tv) else np.zeros(0)

    rows, cols = g.rows, g.indices
    deg = np.maximum(g.degrees(), 1)[:, None]

    h_wl = x
    h_isp = np.zeros((n, mlps.isp_dim))
    assigned = np.zeros(n, dtype=bool)
    trace = []
    for k in range(1, depth + 1):
        comb = np.concatenate([h_wl, h_isp], axis=1)
        nb = np.zeros_like(comb)
        np.add.at(nb, rows, comb[cols])
        if agg == "mean":
            nb = nb / deg
        new_wl = mlps.upd[k - 1](np.concatenate([comb, nb], axis=1))

        h_tri = np.zeros((n, mlps.isp_dim))
        if len(tv):
            msg = alpha[:, None] * mlps.tri(h_isp[tu] + h_isp[tw])
            np.add.at(h_tri, tv, msg)

        gate = (ranks == k) & np.all(h_isp == 0.0, axis=1)
        new_isp = h_isp.copy()
        sel = gate & has_tri
        new_isp[sel] = h_tri[sel]
        sel = gate & ~has_tri
        if sel.any():
            new_isp[sel] = embed(k, mlps.isp_dim)
        assigned = assigned | gate

        h_wl, h_isp = new_wl, new_isp
        trace.append(LayerState(k, h_wl, h_isp, h_tri, gate, assigned.copy()))

    output = mlps.out(np.concatenate([h_wl, h_isp], axis=1))
    return ForwardResult(output, trace, ranks)


@dataclass
class SoftMembership:
    weights: np.ndarray
    beta: float
    S: int
    phi_learn: np.ndarray = field(repr=False)


def soft_membership(phi_learn, beta: float, S: int) -> SoftMembership:
    if beta <= 0:
        raise ValueError("beta must be positive")
    if S < 1:
        raise ValueError("S must be >= 1")
    p = np.asarray(phi_learn, dtype=np.float64)
    levels = np.arange(1, S + 1, dtype=np.float64)
    logits = -beta * np.abs(p[:, None] - levels[None, :])
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=1, keepdims=True)
    return SoftMembership(w, float(beta), int(S), p)


def learnable_invariant_forward(base_values, mlp_phi: FixedMlp, S: int) -> np.ndarray:
    """Map per-node base invariant vectors into ``(1, S)``."""
    if mlp_phi.activations[-1] != "sigmoid" or mlp_phi.out_dim != 1:
        raise ValueError("invariant MLP must end in a single sigmoid unit")
    base = np.asarray(base_values, dtype=np.float64)
    if base.ndim == 1:
        base = base[:, None]
    return (S - 1) * mlp_phi(base)[:, 0] + 1.0


def discretize(phi_learn, S: int, mode: str = "nearest") -> np.ndarray:
    """Layer index per node; ``nearest`` rounds half to even, ``floor`` truncates."""
    p = np.asarray(phi_learn, dtype=np.float64)
    if mode == "nearest":
        r = np.rint(p)
    elif mode == "floor":
        r = np.floor(p)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return np.clip(r, 1, S).astype(np.int64)


def _stack_tri(tri_trace) -> np.ndarray:
    if isinstance(tri_trace, np.ndarray):
        return tri_trace
    return np.stack([s.h_tri if isinstance(s, LayerState) else s for s in tri_trace])


def soft_isp_update(tri_trace, membership: SoftMembership, k: int) -> np.ndarray:
    """Membership-weighted sum of per-layer triangle outputs up to layer ``k``."""
    tri = _stack_tri(tri_trace)
    upto = min(k, membership.S, len(tri))
    w = membership.weights[:, :upto].T
    return np.einsum("kn,knd->nd", w, tri[:upto])


def hard_isp_update(tri_trace, strata, k: int) -> np.ndarray:
    """Triangle output at each node's own layer if it has been reached, else zero."""
    tri = _stack_tri(tri_trace)
    strata = np.asarray(strata, dtype=np.int64)
    out = np.zeros(tri.shape[1:])
    for v, j in enumerate(strata):
        if 1 <= j <= min(k, len(tri)):
            out[v] = tri[j - 1, v]
    return out
