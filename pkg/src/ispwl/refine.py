"""Dual-stream ISP-WL color refinement and plain 1-WL.

Colors are compact integers handed out by interning canonical signatures
in a dictionary shared by every graph of a run, so colors are comparable
across graphs and the "hash" is injective by construction. New signatures
of one step are sorted before interning, which makes the labels
independent of node order.

The uncolored ISP sentinel is stored as ``BOTTOM = -1``, below every real
color, so it sorts first inside multisets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import Graph, GraphError, all_triangles, disjoint_union
from .stratify import RankedInvariant

BOTTOM = -1


class ContractError(GraphError):
    """Inputs that violate a refinement precondition."""


@dataclass
class ColorState:
    wl_colors: np.ndarray
    isp_colors: np.ndarray
    iteration: int = 0
    wl_dictionary: dict = field(default_factory=dict)
    isp_dictionary: dict = field(default_factory=dict)
    isp_writes: np.ndarray | None = None
    isp_write_iteration: np.ndarray | None = None

    @classmethod
    def initial(cls, n: int) -> "ColorState":
        return cls(
            np.zeros(n, dtype=np.int64),
            np.full(n, BOTTOM, dtype=np.int64),
            isp_writes=np.zeros(n, dtype=np.int64),
            isp_write_iteration=np.zeros(n, dtype=np.int64),
        )


@dataclass
class RefinementResult:
    graph_id: str
    final_colors: np.ndarray
    wl_colors: np.ndarray
    isp_colors: np.ndarray
    iterations_run: int
    wl_converged_at: int
    level_count: int
    wl_counts: list[int]
    isp_counts: list[int]
    final_count: int
    isp_writes: np.ndarray
    isp_write_iteration: np.ndarray
    history: list[np.ndarray] | None = None

    def histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.final_colors, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))

    @property
    def distinct(self) -> int:
        return len(np.unique(self.final_colors))


def wl_partition_stable(prev, next_) -> bool:
    """True iff both colorings induce the same equivalence classes."""
    a = np.asarray(getattr(prev, "wl_colors", prev))
    b = np.asarray(getattr(next_, "wl_colors", next_))
    if a.shape != b.shape:
        raise ContractError("colorings cover different node sets")
    if a.size == 0:
        return True
    na = len(np.unique(a))
    nb = len(np.unique(b))
    if na != nb:
        return False
    pairs = np.unique(np.stack([a, b], axis=1), axis=0)
    return len(pairs) == na


def _intern(keys: list, dictionary: dict) -> np.ndarray:
    fresh = {k for k in keys if k not in dictionary}
    for k in sorted(fresh):
        dictionary[k] = len(dictionary)
    return np.fromiter((dictionary[k] for k in keys), dtype=np.int64, count=len(keys))


class _Layout:
    """Per-run CSR bookkeeping for building WL signatures.

    Each node's signature is one big-endian int64 run: its own packed
    (wl, isp) color followed by its neighbors' packed colors in ascending
    order. Big-endian keeps byte order equal to numeric order for the
    non-negative packed values, and the fixed-width head makes the encoding
    injective.
    """

    def __init__(self, g: Graph):
        n = g.node_count
        self.g = g
        self.ptr = g.indptr + np.arange(n + 1)
        self.head = self.ptr[:-1]
        self.tail = np.ones(int(self.ptr[-1]), dtype=bool)
        self.tail[self.head] = False
        self.byte_ptr = (self.ptr * 8).tolist()


def _wl_step(layout: _Layout, state: ColorState) -> np.ndarray:
    g = layout.g
    packed = (state.wl_colors << 32) | (state.isp_colors + 1)
    vals = packed[g.indices]
    order = np.lexsort((vals, g.rows))
    buf = np.empty(len(layout.tail), dtype=">i8")
    buf[layout.head] = packed
    buf[layout.tail] = vals[order]
    raw = buf.tobytes()
    p = layout.byte_ptr
    keys = [raw[p[v]:p[v + 1]] for v in range(g.node_count)]
    return _intern(keys, state.wl_dictionary)


def _isp_signature(v, pv, tris, isp, ranks):
    if not tris:
        return (0, pv, ())
    elems = []
    for u, w in tris:
        pu, pw = int(ranks[u]), int(ranks[w])
        cu, cw = int(isp[u]), int(isp[w])
        # orient so the neighbor with the larger center gap comes first
        if (pu, cu) > (pw, cw):
            pu, pw, cu, cw = pw, pu, cw, cu
        elems.append((cu, cw, pv - pu, pv - pw, pw - pu))
    elems.sort()
    return (1, pv, tuple(elems))


def _check_phi(graphs: Sequence[Graph], phi: RankedInvariant, graph_ids: Sequence[str] | None):
    if len(phi.ranks) != len(graphs):
        raise ContractError(
            f"ranking covers {len(phi.ranks)} graphs but {len(graphs)} were given"
        )
    for i, (g, r) in enumerate(zip(graphs, phi.ranks)):
        if len(r) != g.node_count:
            raise ContractError(f"ranking for graph {i} has {len(r)} entries, graph has {g.node_count}")
    if graph_ids is not None and list(graph_ids) != list(phi.comparison_set):
        raise ContractError(
            f"ranking was computed over {phi.comparison_set}, not {list(graph_ids)}"
        )
    if phi.level_count:
        allr = np.concatenate(phi.ranks) if phi.ranks else np.zeros(0, dtype=np.int64)
        if allr.size and (allr.min() < 1 or allr.max() > phi.level_count):
            raise ContractError("ranks fall outside 1..L")


def _refine(
    graphs: Sequence[Graph],
    phi: RankedInvariant | None,
    graph_ids: Sequence[str] | None,
    track_history: bool,
    max_iterations: int | None,
    triangle_lists: list | None,
) -> tuple[list[RefinementResult], ColorState]:
    graphs = list(graphs)
    if graph_ids is None:
        ids = phi.comparison_set if phi is not None else [f"g{i}" for i in range(len(graphs))]
    else:
        ids = list(graph_ids)
    if phi is not None:
        _check_phi(graphs, phi, graph_ids)
    union = graphs[0] if len(graphs) == 1 else disjoint_union(graphs)
    n = union.node_count
    offsets = np.cumsum([0] + [g.node_count for g in graphs])
    state = ColorState.initial(n)
    layout = _Layout(union)

    L = 0
    strata: list[np.ndarray] = []
    ranks = np.zeros(n, dtype=np.int64)
    if phi is not None:
        L = phi.level_count
        if n:
            ranks = np.concatenate([np.asarray(r, dtype=np.int64) for r in phi.ranks])
        order = np.argsort(ranks, kind="stable")
        bounds = np.searchsorted(ranks[order], np.arange(1, L + 2))
        strata = [order[bounds[i]:bounds[i + 1]] for i in range(L)]
        if triangle_lists is None:
            triangle_lists = all_triangles(union)

    wl_counts: list[list[int]] = [[] for _ in graphs]
    isp_counts: list[list[int]] = [[] for _ in graphs]
    history: list[list[np.ndarray]] = [[] for _ in graphs]
    stable_flags: list[bool] = []

    t = 0
    while True:
        t += 1
        new_wl = _wl_step(layout, state)
        stable = wl_partition_stable(state.wl_colors, new_wl)
        state.wl_colors = new_wl
        stable_flags.append(stable)

        if t <= L:
            members = strata[t - 1].tolist()
            # whole stratum reads ISP colors from before this layer's writes
            keys = [
                _isp_signature(v, t, triangle_lists[v], state.isp_colors, ranks) for v in members
            ]
            colors = _intern(keys, state.isp_dictionary)
            if members:
                state.isp_colors[members] = colors
                state.isp_writes[members] += 1
                state.isp_write_iteration[members] = t
        state.iteration = t

        for i in range(len(graphs)):
            sl = slice(offsets[i], offsets[i + 1])
            wl_counts[i].append(len(np.unique(state.wl_colors[sl])))
            isp_counts[i].append(len(np.unique(state.isp_colors[sl])))
            if track_history:
                history[i].append(
                    (state.wl_colors[sl] << 32) | (state.isp_colors[sl] + 1)
                )

        if stable and t >= L:
            break
        if max_iterations is not None and t >= max_iterations:
            break

    # first iteration from which the WL partition never changed again
    k_wl = t
    while k_wl > 1 and stable_flags[k_wl - 2]:
        k_wl -= 1

    if phi is None:
        final = state.wl_colors.copy()
    else:
        final_dict: dict = {}
        final = _intern(list(zip(state.wl_colors.tolist(), state.isp_colors.tolist())), final_dict)

    results = []
    for i, gid in enumerate(ids):
        sl = slice(offsets[i], offsets[i + 1])
        results.append(
            RefinementResult(
                graph_id=gid,
                final_colors=final[sl],
                wl_colors=state.wl_colors[sl],
                isp_colors=state.isp_colors[sl],
                iterations_run=t,
                wl_converged_at=k_wl,
                level_count=L,
                wl_counts=wl_counts[i],
                isp_counts=isp_counts[i],
                final_count=len(np.unique(final[sl])),
                isp_writes=state.isp_writes[sl],
                isp_write_iteration=state.isp_write_iteration[sl],
                history=history[i] if track_history else None,
            )
        )
    return results, state


def run_isp_wl(
    graphs: Sequence[Graph] | Graph,
    phi: RankedInvariant,
    graph_ids: Sequence[str] | None = None,
    *,
    track_history: bool = False,
    max_iterations: int | None = None,
    triangle_lists: list | None = None,
) -> list[RefinementResult]:
    """Run ISP-WL jointly over ``graphs`` with a ranking computed over the same set.

    ``max_iterations`` truncates the run (used for fixed-iteration timing);
    results of a truncated run need not satisfy the convergence properties.
    ``triangle_lists`` may pass precomputed T(v) lists for the disjoint union.
    """
    if isinstance(graphs, Graph):
        graphs = [graphs]
    results, _ = _refine(graphs, phi, graph_ids, track_history, max_iterations, triangle_lists)
    return results


def run_1wl(
    graphs: Sequence[Graph] | Graph,
    graph_ids: Sequence[str] | None = None,
    *,
    track_history: bool = False,
    max_iterations: int | None = None,
) -> list[RefinementResult]:
    """Standard 1-WL from a uniform coloring, stopped at partition stability."""
    if isinstance(graphs, Graph):
        graphs = [graphs]
    results, _ = _refine(graphs, None, graph_ids, track_history, max_iterations, None)
    return results


def run_isp_wl_state(
    graphs: Sequence[Graph], phi: RankedInvariant, graph_ids: Sequence[str] | None = None
) -> tuple[list[RefinementResult], ColorState]:
    """Like :func:`run_isp_wl` but also returns the shared color state and dictionaries."""
    return _refine(list(graphs), phi, graph_ids, False, None, None)
