"""Command-line interface: ``ispwl {gen,invariants,color,compare,bench}``.

Exit codes: 0 success, 2 input error, 3 contract violation, 4 bad flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import invariants as inv
from .distinguish import corpus_eval, distinguish_pair, parse_method, read_manifest
from .graph import (
    GraphError,
    ParameterError,
    all_triangles,
    format_edge_list,
    generate_ba,
    generate_er,
    generate_named,
    read_graph,
)
from .refine import ContractError, run_1wl, run_isp_wl
from .stratify import global_rank

log = logging.getLogger("ispwl")

EXIT_OK, EXIT_INPUT, EXIT_CONTRACT, EXIT_FLAG = 0, 2, 3, 4


class BadFlag(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    invariants: list[str] = field(default_factory=list)
    method: str = "isp"
    methods: list[str] = field(default_factory=list)
    tolerance: float | None = None
    seed: int = 0
    out: str = "ispwl_out"
    sizes: list[int] = field(default_factory=list)
    repetitions: int = 1
    iterations: int = 5
    m: int = 5
    formats: list[str] = field(default_factory=lambda: ["csv", "json"])


def _meta(cfg: RunConfig) -> dict:
    return {"tool": "ispwl", "version": __version__, "config": asdict(cfg)}


def _write_csv(path: str, header: list[str], rows, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _invariant_names(spec: str | list[str]) -> list[str]:
    names = spec.split(",") if isinstance(spec, str) else spec
    out = []
    for name in names:
        if not name.strip():
            continue
        try:
            out.append(inv.canonical_name(name))
        except KeyError:
            raise BadFlag(
                f"unknown invariant {name!r}; valid names: {', '.join(inv.REGISTRY)}"
            ) from None
    return out


def _graph_id(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    cfg = RunConfig("gen", seed=args.seed, out=args.output or "-")
    fam = args.family
    if fam == "ba":
        if args.n is None:
            raise ParameterError("ba needs --n")
        g = generate_ba(args.n, args.m, args.seed)
    elif fam == "er":
        if args.n is None or args.p is None:
            raise ParameterError("er needs --n and --p")
        g = generate_er(args.n, args.p, args.seed)
    else:
        g = generate_named(fam, *args.params)
    text = format_edge_list(g)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    log.info("wrote %s with %d nodes, %d edges (%s)", cfg.out, g.node_count, g.edge_count, fam)
    return EXIT_OK


def cmd_invariants(args) -> int:
    names = _invariant_names(args.list)
    if not args.graph:
        raise ParameterError("--graph is required")
    cfg = RunConfig("invariants", inputs=[args.graph], invariants=names, tolerance=args.tolerance,
                    out=args.out)
    g = read_graph(args.graph)
    gid = _graph_id(args.graph)
    os.makedirs(args.out, exist_ok=True)
    written = []
    for name in names:
        vals = inv.compute(name, g, gid)
        params = json.dumps(vals.params, sort_keys=True)
        path = os.path.join(args.out, f"invariant_{name}.csv")
        _write_csv(path, ["node_id", "value"],
                   ((v, repr(float(x))) for v, x in enumerate(vals.values)),
                   comment=f"invariant={name} graph={gid} params={params}")
        phi = global_rank([vals], args.tolerance)
        ppath = os.path.join(args.out, f"phi_{name}.csv")
        _write_csv(ppath, ["node_id", "phi"], enumerate(phi.ranks[0].tolist()),
                   comment=f"invariant={name} graph={gid} levels={phi.level_count} "
                           f"tolerance={phi.tolerance!r}")
        written += [path, ppath]
    _write_labels(g, args.out)
    _write_json(os.path.join(args.out, "invariants.json"), {**_meta(cfg), "files": written})
    return EXIT_OK


def _write_labels(g, out: str) -> None:
    if g.labels is not None:
        _write_csv(os.path.join(out, "labels.csv"), ["node_id", "label"], enumerate(g.labels))


def cmd_color(args) -> int:
    kind, name = parse_method(args.method, args.invariant)
    cfg = RunConfig("color", inputs=list(args.graph), invariants=[name] if name else [],
                    method=kind, tolerance=args.tolerance, out=args.out)
    graphs = [read_graph(p) for p in args.graph]
    ids = _unique_ids(args.graph)
    t0 = time.perf_counter()
    wl = run_1wl(graphs, ids)
    isp = None
    phi = None
    if kind == "isp":
        phi = global_rank([inv.compute(name, g, gid) for g, gid in zip(graphs, ids)],
                          args.tolerance)
        isp = run_isp_wl(graphs, phi, ids)
    elapsed = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    rows = []
    main = isp if isp is not None else wl
    for r in main:
        for v in range(len(r.final_colors)):
            isp_c = int(r.isp_colors[v]) if isp is not None else ""
            rows.append((r.graph_id, v, int(r.wl_colors[v]), isp_c, int(r.final_colors[v])))
    _write_csv(os.path.join(args.out, "coloring.csv"),
               ["graph_id", "node_id", "wl_color", "isp_color", "final_color"], rows)
    per_graph = []
    for i, gid in enumerate(ids):
        entry = {
            "graph_id": gid,
            "nodes": graphs[i].node_count,
            "edges": graphs[i].edge_count,
            "duplicates_collapsed": graphs[i].duplicates_collapsed,
            "wl_distinct": wl[i].distinct,
            "wl_iterations": wl[i].iterations_run,
        }
        if isp is not None:
            r = isp[i]
            entry.update(
                isp_distinct=r.distinct,
                iterations_run=r.iterations_run,
                K_WL=r.wl_converged_at,
                L=r.level_count,
                wl_counts=r.wl_counts,
                isp_counts=r.isp_counts,
            )
        else:
            entry.update(iterations_run=wl[i].iterations_run, K_WL=wl[i].wl_converged_at,
                         wl_counts=wl[i].wl_counts)
        per_graph.append(entry)
    summary = {**_meta(cfg), "graphs": per_graph, "runtime_seconds": elapsed}
    if phi is not None:
        summary["ranking"] = {"invariant": phi.invariant_name, "L": phi.level_count,
                              "tolerance": phi.tolerance}
    if len(per_graph) == 1:
        summary.update({k: v for k, v in per_graph[0].items() if k != "graph_id"})
    _write_json(os.path.join(args.out, "summary.json"), summary)
    print(json.dumps({k: summary[k] for k in ("wl_distinct", "isp_distinct") if k in summary}
                     or {"graphs": [(g["graph_id"], g["wl_distinct"]) for g in per_graph]}))
    return EXIT_OK


def _unique_ids(paths) -> list[str]:
    ids = []
    for p in paths:
        base = _graph_id(p)
        gid, k = base, 1
        while gid in ids:
            gid = f"{base}_{k}"
            k += 1
        ids.append(gid)
    return ids


def cmd_compare(args) -> int:
    if args.manifest:
        methods = args.methods.split(",") if args.methods else [f"isp:{args.invariant or 'degree'}"]
        for m in methods:
            _check_method(m)
        cfg = RunConfig("compare", inputs=[args.manifest], methods=methods, out=args.out)
        pairs = read_manifest(args.manifest)
        summary = corpus_eval(pairs, methods)
        os.makedirs(args.out, exist_ok=True)
        _write_report_csv(os.path.join(args.out, "pairs.csv"), summary.reports)
        _write_json(os.path.join(args.out, "summary.json"), {**_meta(cfg), **summary.to_json()})
        print(json.dumps({"accuracy": summary.accuracy}))
        for err in summary.errors:
            print(f"error: pair {err['pair']}: {err['error']}", file=sys.stderr)
        return EXIT_INPUT if summary.errors else EXIT_OK

    if len(args.graphs) != 2:
        raise ParameterError("compare needs two graph paths or --manifest")
    method = args.method if args.method else ("isp" if args.invariant else "1wl")
    kind, name = _check_method(method, args.invariant or "degree")
    cfg = RunConfig("compare", inputs=list(args.graphs), invariants=[name] if name else [],
                    method=kind, out=args.out)
    g1, g2 = (read_graph(p) for p in args.graphs)
    ids = tuple(_unique_ids(args.graphs))
    rep = distinguish_pair(g1, g2, kind, name, ids)
    os.makedirs(args.out, exist_ok=True)
    _write_report_csv(os.path.join(args.out, "pairs.csv"), [rep])
    _write_json(os.path.join(args.out, "summary.json"), {**_meta(cfg), "report": rep.to_row()})
    print(json.dumps({"method": rep.method, "distinguished": rep.distinguished}))
    return EXIT_OK


def _check_method(method, invariant=None):
    try:
        return parse_method(method, invariant)
    except KeyError as exc:
        raise BadFlag(f"unknown invariant {exc.args[0]!r}; valid names: {', '.join(inv.REGISTRY)}")
    except ParameterError as exc:
        raise BadFlag(str(exc))


def _write_report_csv(path, reports) -> None:
    header = ["g1", "g2", "method", "distinguished", "first_separating_iteration",
              "color_count_g1", "color_count_g2", "iterations_run", "runtime"]
    rows = []
    for r in reports:
        row = r.to_row()
        row["first_separating_iteration"] = row["first_separating_iteration"] or ""
        rows.append([row[h] for h in header])
    _write_csv(path, header, rows)


def loglog_slope(xs, ys) -> float:
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ok = (xs > 0) & (ys > 0)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs[ok]), np.log(ys[ok]), 1)[0])


def run_bench(sizes, invariants, m=5, seed=0, iterations=5, repetitions=1):
    """Time fixed-iteration ISP-WL on BA graphs of each size.

    Returns ``(rows, slopes)``; per-iteration time is the minimum over
    repetitions.
    """
    if not sizes:
        raise ParameterError("empty size sweep")
    if not invariants:
        raise ParameterError("no invariants to benchmark")
    rows = []
    for i, n in enumerate(sizes):
        g = generate_ba(n, m, seed + i)
        t0 = time.perf_counter()
        tris = all_triangles(g)
        tri_time = time.perf_counter() - t0
        tri_count = sum(len(t) for t in tris) // 3
        for name in invariants:
            best_iter = best_pre = float("inf")
            for _ in range(repetitions):
                t0 = time.perf_counter()
                phi = global_rank([inv.compute(name, g)])
                pre = time.perf_counter() - t0 + tri_time
                t0 = time.perf_counter()
                (res,) = run_isp_wl(g, phi, max_iterations=iterations, triangle_lists=tris)
                per_iter = (time.perf_counter() - t0) / res.iterations_run
                best_iter = min(best_iter, per_iter)
                best_pre = min(best_pre, pre)
            rows.append({
                "method": f"isp:{name}",
                "n": n,
                "edges": g.edge_count,
                "triangles": tri_count,
                "preprocess_seconds": best_pre,
                "per_iteration_seconds": best_iter,
                "iterations": res.iterations_run,
                "amortized_preprocess_seconds": best_pre / res.iterations_run,
            })
            log.info("bench n=%d %s: %.4fs/iter", n, name, best_iter)
    slopes = {}
    for name in invariants:
        sel = [r for r in rows if r["method"] == f"isp:{name}"]
        slopes[f"isp:{name}"] = loglog_slope([r["n"] for r in sel],
                                             [r["per_iteration_seconds"] for r in sel])
    first = [r for r in rows if r["method"] == f"isp:{invariants[0]}"]
    slopes["triangles"] = loglog_slope([r["n"] for r in first], [r["triangles"] for r in first])
    return rows, slopes


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    names = _invariant_names(args.invariants)
    cfg = RunConfig("bench", invariants=names, seed=args.seed, out=args.out, sizes=sizes,
                    repetitions=args.repetitions, iterations=args.iterations, m=args.m)
    rows, slopes = run_bench(sizes, names, args.m, args.seed, args.iterations, args.repetitions)
    os.makedirs(args.out, exist_ok=True)
    header = list(rows[0].keys()) + ["slope"]
    _write_csv(os.path.join(args.out, "bench.csv"), header,
               [[r[h] for h in header[:-1]] + [slopes[r["method"]]] for r in rows])
    _write_json(os.path.join(args.out, "bench.json"),
                {**_meta(cfg), "rows": rows, "loglog_slopes": slopes})
    print(json.dumps({"loglog_slopes": slopes}))
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_FLAG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ispwl", description="Invariant-stratified WL color refinement")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", help="write a generated graph as an edge list")
    s.add_argument("family", choices=["cycle", "clique", "path", "star", "disjoint_cliques", "ba", "er"])
    s.add_argument("params", nargs="*", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--p", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("invariants", help="compute invariant and rank CSVs")
    s.add_argument("--graph")
    s.add_argument("--list", default="degree")
    s.add_argument("--tolerance", type=float)
    s.add_argument("--out", default="ispwl_out")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("color", help="run ISP-WL or 1-WL and dump colorings")
    s.add_argument("--graph", action="append", required=True)
    s.add_argument("--invariant", default="degree")
    s.add_argument("--method", default="isp", choices=["isp", "1wl"])
    s.add_argument("--tolerance", type=float)
    s.add_argument("--out", default="ispwl_out")
    s.set_defaults(func=cmd_color)

    s = sub.add_parser("compare", help="test whether graph pairs are distinguished")
    s.add_argument("graphs", nargs="*")
    s.add_argument("--manifest")
    s.add_argument("--methods")
    s.add_argument("--method")
    s.add_argument("--invariant")
    s.add_argument("--out", default="ispwl_out")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("bench", help="BA scaling sweep")
    s.add_argument("--sizes", default="10000,50000,100000")
    s.add_argument("--invariants", default="degree,core,onion,truss")
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iterations", type=int, default=5)
    s.add_argument("--repetitions", type=int, default=1)
    s.add_argument("--out", default="ispwl_out")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.command in ("color", "compare") and getattr(args, "invariant", None):
            _invariant_names(args.invariant)
        return args.func(args)
    except BadFlag as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAG
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (OSError, GraphError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
