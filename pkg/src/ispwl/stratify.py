"""Global ranking of invariant values and hierarchical gap encodings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .graph import Graph, GraphError, ParameterError
from .invariants import InvariantValues

DEFAULT_TOLERANCE = 1e-9


@dataclass
class RankedInvariant:
    """Dense 1-based ranks for every node of every graph in a comparison set."""

    ranks: list[np.ndarray]
    level_count: int
    invariant_name: str
    comparison_set: list[str]
    tolerance: float = 0.0

    def phi(self, v: int, graph: int = 0) -> int:
        return int(self.ranks[graph][v])

    @classmethod
    def single(cls, ranks: Sequence[int], name: str = "custom") -> "RankedInvariant":
        """Wrap precomputed ranks for one graph (levels must already be dense)."""
        arr = np.asarray(ranks, dtype=np.int64)
        return cls([arr], int(arr.max(initial=0)), name, ["g0"])


class GapTriple(NamedTuple):
    delta1: int
    delta2: int
    delta3: int


class MotifGaps(NamedTuple):
    center_gaps: tuple
    inter_gaps: tuple


def global_rank(
    value_sets: Sequence[InvariantValues], tolerance: float | None = None
) -> RankedInvariant:
    """Rank values over the union of all graphs.

    Sorted values are grouped while each step to the next value is within
    ``tolerance``. ``None`` means exact grouping for integral values and
    ``DEFAULT_TOLERANCE`` otherwise.
    """
    if not value_sets:
        raise ParameterError("empty comparison set")
    names = {vs.invariant_name for vs in value_sets}
    if len(names) != 1:
        raise ParameterError(f"value sets come from different invariants: {sorted(names)}")
    if tolerance is None:
        tolerance = 0.0 if all(vs.is_integral() for vs in value_sets) else DEFAULT_TOLERANCE
    allv = np.concatenate([np.asarray(vs.values, dtype=np.float64) for vs in value_sets])
    levels = np.zeros(len(allv), dtype=np.int64)
    if len(allv):
        order = np.argsort(allv, kind="stable")
        sv = allv[order]
        step = np.diff(sv) > tolerance
        levels[order] = 1 + np.concatenate([[0], np.cumsum(step)])
    L = int(levels.max(initial=0))
    ranks = []
    off = 0
    for vs in value_sets:
        ranks.append(levels[off:off + len(vs)])
        off += len(vs)
    return RankedInvariant(
        ranks, L, names.pop(), [vs.graph_id for vs in value_sets], float(tolerance)
    )


def gap_triple(phi: RankedInvariant, v: int, u: int, w: int, graph: int = 0) -> GapTriple:
    r = phi.ranks[graph]
    return gap_triple_from_ranks(int(r[v]), int(r[u]), int(r[w]))


def gap_triple_from_ranks(pv: int, pu: int, pw: int) -> GapTriple:
    a, b = pv - pu, pv - pw
    return GapTriple(max(a, b), min(a, b), abs(pu - pw))


def reconstruct_neighbor_ranks(phi_v: int, gaps: GapTriple) -> tuple[int, int]:
    """Recover the sorted pair of neighbor ranks from the center rank and gaps."""
    return (phi_v - gaps.delta1, phi_v - gaps.delta2)


def motif_gaps(
    phi: RankedInvariant,
    g: Graph,
    center: int,
    members: Sequence[int],
    motif_edges: Sequence[tuple[int, int]],
    graph: int = 0,
) -> MotifGaps:
    """Sorted center-to-member gaps and sorted gaps across motif edges.

    ``motif_edges`` refer to node ids, and every member must neighbor
    ``center``.
    """
    nbrs = g.neighbor_sets[center]
    for u in members:
        if u not in nbrs:
            raise GraphError(f"motif member {u} is not a neighbor of {center}")
    mset = set(members)
    for a, b in motif_edges:
        if a not in mset or b not in mset:
            raise GraphError(f"motif edge ({a}, {b}) leaves the member set")
    r = phi.ranks[graph]
    pc = int(r[center])
    center_gaps = tuple(sorted(pc - int(r[u]) for u in members))
    inter_gaps = tuple(sorted(abs(int(r[a]) - int(r[b])) for a, b in motif_edges))
    return MotifGaps(center_gaps, inter_gaps)
