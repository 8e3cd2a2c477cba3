"""Invariant-stratified Weisfeiler-Leman refinement (ISP-WL) and friends."""

from importlib import resources

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    Graph,
    GraphError,
    ParameterError,
    ParseError,
    TriangleSet,
    apply_permutation,
    generate_ba,
    generate_er,
    generate_named,
    parse_edge_list,
    parse_graph6,
    read_graph,
    triangles,
)
from .refine import ContractError, run_1wl, run_isp_wl, wl_partition_stable  # noqa: E402
from .stratify import RankedInvariant, gap_triple, global_rank, motif_gaps  # noqa: E402


def les_miserables() -> Graph:
    """The bundled 77-node, 254-edge Les Miserables co-occurrence graph."""
    text = resources.files(__package__).joinpath("data/lesmis.edges").read_text("utf-8")
    return parse_edge_list(text)
