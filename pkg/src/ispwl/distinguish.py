"""Pairwise graph/node distinguishability and corpus evaluation."""

from __future__ import annotations

import os
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import invariants as inv
from .graph import Graph, GraphError, ParameterError, read_graph
from .refine import RefinementResult, run_1wl, run_isp_wl
from .stratify import global_rank


@dataclass
class DistinguishReport:
    pair: tuple[str, str]
    method: str
    distinguished: bool
    first_separating_iteration: int | None
    color_count_g1: int
    color_count_g2: int
    iterations_run: int
    runtime: float

    def to_row(self) -> dict:
        row = asdict(self)
        row["g1"], row["g2"] = row.pop("pair")
        return row


def parse_method(method: str, invariant: str | None = None) -> tuple[str, str | None]:
    """Normalize ``"1wl"``, ``"isp"`` + invariant, or ``"isp:<invariant>"``."""
    m = method.strip().lower()
    if m in ("1wl", "1-wl", "wl"):
        return "1wl", None
    if m.startswith("isp:"):
        m, invariant = "isp", m[4:]
    if m in ("isp", "isp-wl", "ispwl"):
        if not invariant:
            raise ParameterError("ISP-WL needs an invariant name")
        return "isp", inv.canonical_name(invariant)
    raise ParameterError(f"unknown method {method!r}")


def method_label(kind: str, invariant: str | None) -> str:
    return "1wl" if kind == "1wl" else f"isp:{invariant}"


def joint_run(
    graphs: Sequence[Graph],
    method: str,
    invariant: str | None = None,
    graph_ids: Sequence[str] | None = None,
    track_history: bool = False,
) -> list[RefinementResult]:
    kind, name = parse_method(method, invariant)
    ids = list(graph_ids) if graph_ids is not None else [f"g{i}" for i in range(len(graphs))]
    if kind == "1wl":
        return run_1wl(graphs, ids, track_history=track_history)
    phi = global_rank([inv.compute(name, g, gid) for g, gid in zip(graphs, ids)])
    return run_isp_wl(graphs, phi, ids, track_history=track_history)


def distinguish_pair(
    g1: Graph,
    g2: Graph,
    method: str = "isp",
    invariant: str | None = None,
    ids: tuple[str, str] = ("g1", "g2"),
) -> DistinguishReport:
    kind, name = parse_method(method, invariant)
    t0 = time.perf_counter()
    r1, r2 = joint_run([g1, g2], kind, name, ids, track_history=True)
    elapsed = time.perf_counter() - t0
    distinguished = Counter(r1.final_colors.tolist()) != Counter(r2.final_colors.tolist())
    first = None
    if distinguished:
        for t, (h1, h2) in enumerate(zip(r1.history, r2.history), start=1):
            if Counter(h1.tolist()) != Counter(h2.tolist()):
                first = t
                break
        if first is None:
            # only the final (WL, ISP) combination separates
            first = r1.iterations_run
    return DistinguishReport(
        pair=tuple(ids),
        method=method_label(kind, name),
        distinguished=distinguished,
        first_separating_iteration=first,
        color_count_g1=r1.final_count,
        color_count_g2=r2.final_count,
        iterations_run=r1.iterations_run,
        runtime=elapsed,
    )


def distinguish_nodes(
    g1: Graph, u: int, g2: Graph, v: int, method: str = "isp", invariant: str | None = None
) -> bool:
    """Whether node ``u`` of ``g1`` and ``v`` of ``g2`` end with different colors.

    Passing the same graph object twice compares two nodes of one graph.
    """
    for g, x in ((g1, u), (g2, v)):
        if not 0 <= x < g.node_count:
            raise IndexError(f"node {x} out of range for {g.node_count} nodes")
    if g1 is g2:
        (r,) = joint_run([g1], method, invariant)
        return bool(r.final_colors[u] != r.final_colors[v])
    r1, r2 = joint_run([g1, g2], method, invariant)
    return bool(r1.final_colors[u] != r2.final_colors[v])


@dataclass
class CorpusSummary:
    methods: list[str]
    pair_count: int
    accuracy: dict[str, float]
    mean_time: dict[str, float]
    reports: list[DistinguishReport] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "methods": self.methods,
            "pair_count": self.pair_count,
            "accuracy": self.accuracy,
            "mean_time": self.mean_time,
            "errors": self.errors,
        }


def corpus_eval(pairs: Sequence, methods: Sequence[str]) -> CorpusSummary:
    """Run every method on every pair.

    A pair is ``(g1, g2)``, ``(g1, g2, id1, id2)``, or a pair of file paths.
    Pairs that fail to load are recorded in ``errors`` and skipped.
    """
    if not pairs:
        raise ParameterError("empty corpus")
    if not methods:
        raise ParameterError("no methods given")
    parsed = [parse_method(m) for m in methods]
    labels = [method_label(k, n) for k, n in parsed]
    reports: list[DistinguishReport] = []
    errors: list[dict] = []
    hits = {lab: 0 for lab in labels}
    times = {lab: [] for lab in labels}
    ok = 0
    for idx, pair in enumerate(pairs):
        try:
            g1, g2, ids = _load_pair(pair, idx)
        except (OSError, GraphError) as exc:
            errors.append({"pair": idx, "error": str(exc)})
            continue
        ok += 1
        for (kind, name), lab in zip(parsed, labels):
            try:
                rep = distinguish_pair(g1, g2, kind, name, ids)
            except GraphError as exc:
                errors.append({"pair": idx, "method": lab, "error": str(exc)})
                continue
            reports.append(rep)
            hits[lab] += rep.distinguished
            times[lab].append(rep.runtime)
    accuracy = {lab: (hits[lab] / ok if ok else 0.0) for lab in labels}
    mean_time = {lab: (float(np.mean(times[lab])) if times[lab] else 0.0) for lab in labels}
    return CorpusSummary(labels, ok, accuracy, mean_time, reports, errors)


def _load_pair(pair, idx):
    if len(pair) == 4:
        g1, g2, a, b = pair
        return g1, g2, (a, b)
    a, b = pair
    if isinstance(a, Graph):
        return a, b, (f"p{idx}a", f"p{idx}b")
    return read_graph(a), read_graph(b), (str(a), str(b))


def read_manifest(path: str) -> list[tuple[str, str]]:
    """Manifest lines hold two graph paths; relative paths resolve against the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"manifest line {lineno}: expected two paths")
            pairs.append(tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in parts))
    return pairs


def refinement_census(g: Graph, invariants: Sequence[str]) -> dict[str, int]:
    """Distinct final color counts for 1-WL and each ISP-WL variant on one graph."""
    out = {"1wl": run_1wl(g)[0].distinct}
    for name in invariants:
        key = inv.canonical_name(name)
        phi = global_rank([inv.compute(key, g)])
        out[f"isp:{key}"] = run_isp_wl(g, phi)[0].distinct
    return out
