"""Command-line interface.

Every subcommand reads graph6 (a file, ``-`` for stdin, or
``random:N[:SEED]`` for a generated connected cubic graph) and writes one
JSON object per line. Exit codes: 0 success with a certificate, 2 verified
nonexistence, 3 a stage failed, 4 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import kernels
from .balance import verify_isomorphic_bisection
from .census import VertexColoring
from .coloring import (
    BallTooLargeError,
    BisectionError,
    classify_balls,
    make_bisection,
    pair_opposite_balls,
    path_discrepancies,
    random_proper_coloring,
    select_separated_centres,
)
from .decompose import SearchBudgetExceeded, heuristic_decompose, thomassen_decompose
from .graph import Graph, GraphError
from .graph6 import Graph6Error, encode_graph6, parse_graph6
from .harness import (
    GenerationError,
    PipelineConfig,
    concentration_experiment,
    random_cubic,
    run_pipeline,
)
from .oracle import (
    OracleLimitError,
    brute_force_bisection,
    exhaustive_reducer_search,
    verify_conjecture_stream,
)
from .reducers import Reducer, find_reducer, verify_reducer

EXIT_OK = 0
EXIT_NONEXISTENT = 2
EXIT_STAGE_FAILURE = 3
EXIT_INPUT_ERROR = 4

log = logging.getLogger("isobisect")


class InputError(Exception):
    pass


def _read_lines(source: str) -> list[str]:
    if source == "-":
        return sys.stdin.read().splitlines()
    try:
        return Path(source).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from exc


def load_graphs(source: str, cubic: bool = True) -> list[Graph]:
    """Graphs named by ``source``; raises InputError on any bad line."""
    if source.startswith("random:"):
        parts = source.split(":")[1:]
        try:
            n = int(parts[0])
            seed = int(parts[1]) if len(parts) > 1 else 0
        except (ValueError, IndexError) as exc:
            raise InputError(f"bad random spec {source!r}; use random:N[:SEED]") from exc
        try:
            return [random_cubic(n, seed)]
        except (ValueError, GenerationError) as exc:
            raise InputError(str(exc)) from exc
    graphs = []
    for i, line in enumerate(_read_lines(source), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            graphs.append(parse_graph6(line, cubic=cubic))
        except (Graph6Error, GraphError) as exc:
            raise InputError(f"line {i}: {exc}") from exc
    if not graphs:
        raise InputError(f"no graphs in {source}")
    return graphs


class Output:
    def __init__(self, path: str | None):
        self.fh = open(path, "w") if path else sys.stdout

    def emit(self, obj: dict):
        self.fh.write(json.dumps(obj, sort_keys=True) + "\n")
        self.fh.flush()

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _write_dot(prefix: str | None, index: int, g: Graph, colouring=None):
    if not prefix:
        return
    path = Path(f"{prefix}{index}.dot")
    path.write_text(g.to_dot(colouring, name=f"G{index}"))
    log.info("wrote %s", path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_decompose(args, out: Output) -> int:
    code = EXIT_OK
    for i, g in enumerate(load_graphs(args.graph)):
        rec = {"index": i, "n": g.n, "graph6": encode_graph6(g)}
        if args.exact:
            try:
                pair = thomassen_decompose(g, args.l1, args.l2, budget=args.budget)
            except SearchBudgetExceeded:
                rec.update(status="budget exceeded")
                code = max(code, EXIT_STAGE_FAILURE)
                out.emit(rec)
                continue
            if pair is None:
                rec.update(status="none")
                code = max(code, EXIT_NONEXISTENT)
                out.emit(rec)
                continue
        else:
            pair = heuristic_decompose(g, args.l1, args.l2, seed=args.seed)
            if pair is None:
                rec.update(status="failed")
                code = max(code, EXIT_STAGE_FAILURE)
                out.emit(rec)
                continue
        rec.update(status="ok", decomposition=pair.to_json())
        out.emit(rec)
    return code


def cmd_color(args, out: Output) -> int:
    code = EXIT_OK
    for i, g in enumerate(load_graphs(args.graph)):
        rec = {"index": i, "n": g.n, "seed": args.seed}
        pair = heuristic_decompose(g, args.l1, args.l2, seed=args.seed)
        if pair is None:
            rec.update(status="decompose failed")
            code = EXIT_STAGE_FAILURE
            out.emit(rec)
            continue
        phi = random_proper_coloring(g, pair, args.seed)
        rec["imbalance"] = phi.imbalance
        rec["discrepancy_proper"] = path_discrepancies(g, phi)
        try:
            bis, flipped = make_bisection(g, phi, pair)
        except BisectionError as exc:
            rec.update(status=f"bisect failed: {exc}")
            code = EXIT_STAGE_FAILURE
            out.emit(rec)
            continue
        rec.update(
            status="ok",
            flipped_paths=len(flipped),
            discrepancy=path_discrepancies(g, bis),
            colouring=bis.to_json(),
        )
        if args.d is not None:
            try:
                census = classify_balls(g, bis, select_separated_centres(g, args.d), args.d)
            except BallTooLargeError as exc:
                rec.update(status=f"classify failed: {exc}")
                code = EXIT_STAGE_FAILURE
                out.emit(rec)
                continue
            pairing = pair_opposite_balls(census, bis)
            rec["balls"] = {
                "d": args.d,
                "centres": len(census.balls),
                "kappa": census.kappa,
                "histogram": census.histogram(),
                "pairs": pairing.s,
            }
        out.emit(rec)
        _write_dot(args.dot, i, g, bis)
    return code


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        seed=args.seed,
        d=args.d,
        l1=args.l1,
        l2=args.l2,
        radius_budget=args.radius_budget,
        fallback=not args.no_fallback,
        repair_budget=args.repair_budget,
        timings=args.timings,
        include_colouring=args.colouring or bool(args.dot),
    )


def cmd_pipeline(args, out: Output) -> int:
    try:
        cfg = _pipeline_config(args)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    code = EXIT_OK
    for i, g in enumerate(load_graphs(args.graph)):
        col, report = run_pipeline(g, cfg)
        rec = {"index": i, **report.to_json()}
        out.emit(rec)
        if col is None:
            code = EXIT_STAGE_FAILURE
        else:
            _write_dot(args.dot, i, g, col)
    return code


def cmd_verify(args, out: Output) -> int:
    g = _one_graph(args)
    text = args.colouring
    if Path(text).is_file():
        text = Path(text).read_text().strip()
    if len(text) != g.n or set(text) - set("RB"):
        raise InputError(f"colouring must be {g.n} characters of R and B")
    cert = verify_isomorphic_bisection(g, VertexColoring.from_json(text))
    out.emit({"n": g.n, **cert.to_json()})
    return EXIT_OK if cert.ok else EXIT_STAGE_FAILURE


def cmd_bruteforce(args, out: Output) -> int:
    code = EXIT_OK
    for i, g in enumerate(load_graphs(args.graph, cubic=False)):
        try:
            col = brute_force_bisection(g, limit=args.limit)
        except OracleLimitError as exc:
            raise InputError(str(exc)) from exc
        if col is None:
            out.emit({"index": i, "n": g.n, "outcome": "none"})
            code = EXIT_NONEXISTENT
        else:
            out.emit({"index": i, "n": g.n, "outcome": "exists", "colouring": col.to_json()})
            _write_dot(args.dot, i, g, col)
    return code


def cmd_verify_stream(args, out: Output) -> int:
    report = verify_conjecture_stream(_read_lines(args.graph), limit=args.limit, workers=args.workers)
    if args.human:
        for line in report.summary_lines():
            print(line, file=sys.stderr)
    for o in report.outcomes:
        out.emit(o.to_json(args.timings))
    out.emit({"totals": report.totals, "by_order": {str(n): c for n, c in report.by_order.items()}})
    totals = report.totals
    if totals["none"]:
        return EXIT_NONEXISTENT
    if totals["error"]:
        return EXIT_INPUT_ERROR
    return EXIT_OK


def _one_graph(args) -> Graph:
    graphs = load_graphs(args.graph)
    if len(graphs) != 1:
        raise InputError(f"{args.command} takes exactly one graph")
    return graphs[0]


def cmd_reducer_find(args, out: Output) -> int:
    g = _one_graph(args)
    if not 0 <= args.vertex < g.n:
        raise InputError(f"vertex {args.vertex} is not in the graph")
    diagnostics: list = []
    r = find_reducer(g, args.vertex, args.t, radius_budget=args.radius, diagnostics=diagnostics)
    if r is None:
        out.emit({"vertex": args.vertex, "t": args.t, "status": "failed", "diagnostics": [str(d) for d in diagnostics]})
        return EXIT_STAGE_FAILURE
    out.emit({"vertex": args.vertex, "status": "ok", "reducer": r.to_json()})
    return EXIT_OK


def cmd_reducer_verify(args, out: Output) -> int:
    g = _one_graph(args)
    try:
        data = json.loads(Path(args.certificate).read_text())
        cand = Reducer.from_json(data.get("reducer", data))
    except OSError as exc:
        raise InputError(f"cannot read {args.certificate}: {exc.strerror}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad reducer certificate: {exc}") from exc
    verdict = verify_reducer(g, cand)
    out.emit({"ok": verdict.ok, "clause": verdict.clause, "reason": verdict.reason, "transcript": verdict.transcript})
    return EXIT_OK if verdict.ok else EXIT_STAGE_FAILURE


def cmd_reducer_exhaustive(args, out: Output) -> int:
    g = _one_graph(args)
    try:
        region = [int(x) for x in args.region.split(",") if x]
    except ValueError as exc:
        raise InputError(f"bad region {args.region!r}") from exc
    if any(not 0 <= v < g.n for v in region):
        raise InputError("region has a vertex outside the graph")
    try:
        found = exhaustive_reducer_search(g, region, args.t, half=args.half, max_results=args.max_results)
    except OracleLimitError as exc:
        raise InputError(str(exc)) from exc
    for r in found:
        out.emit(r.to_json())
    out.emit({"certificates": len(found)})
    return EXIT_OK if found else EXIT_NONEXISTENT


def _parse_seeds(text: str) -> list[int]:
    seeds: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def cmd_experiment(args, out: Output) -> int:
    try:
        seeds = _parse_seeds(args.seeds)
    except ValueError as exc:
        raise InputError(f"bad seed list {args.seeds!r}") from exc
    if args.n < 4 or args.n % 2:
        raise InputError("n must be even and at least 4")
    records, summary = concentration_experiment(args.n, seeds, args.l1, args.l2, d=args.d, workers=args.workers)
    for r in records:
        rec = r.to_json()
        if not args.timings:
            rec.pop("wall_time")
        out.emit(rec)
    out.emit({"summary": summary})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isobisect", description="Isomorphic bisections of cubic graphs")
    p.add_argument("-o", "--output", help="write JSON lines here instead of stdout")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def graph_arg(sp):
        sp.add_argument("graph", help="graph6 file, '-' for stdin, or random:N[:SEED]")

    def bounds(sp):
        sp.add_argument("--l1", type=int, default=5, help="F1 path length bound")
        sp.add_argument("--l2", type=int, default=5, help="F2 path length bound")

    sp = sub.add_parser("decompose", help="split edges into two linear forests")
    graph_arg(sp)
    bounds(sp)
    how = sp.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="exhaustive backtracking")
    how.add_argument("--heuristic", dest="exact", action="store_false", help="randomised local search (default)")
    sp.add_argument("--budget", type=int, default=2_000_000, help="node budget for --exact")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("color", help="random proper colouring of F1, then a bisection")
    graph_arg(sp)
    bounds(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--d", type=int, default=None, help="also classify and pair balls of this radius")
    sp.add_argument("--dot", metavar="PREFIX", help="write PREFIX<i>.dot per graph")
    sp.set_defaults(func=cmd_color)

    sp = sub.add_parser("pipeline", help="full pipeline with certificate")
    graph_arg(sp)
    bounds(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--d", type=int, default=None, help="ball radius (default: adaptive)")
    sp.add_argument("--radius-budget", "--budget", type=int, default=None, help="reducer radius budget (default: adaptive)")
    sp.add_argument("--no-fallback", action="store_true", help="do not run greedy repair after a failed stage")
    sp.add_argument("--repair-budget", type=int, default=2_000_000)
    sp.add_argument("--timings", action="store_true", help="record per-stage wall time")
    sp.add_argument("--colouring", action="store_true", help="embed the final colouring in the report")
    sp.add_argument("--dot", metavar="PREFIX", help="write PREFIX<i>.dot for each success")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("verify", help="certify a colouring as an isomorphic bisection")
    graph_arg(sp)
    sp.add_argument("colouring", help="string of R/B, or a file holding one")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bruteforce", help="exhaustive isomorphic bisection search")
    graph_arg(sp)
    sp.add_argument("--limit", type=int, default=16, help="largest vertex count accepted")
    sp.add_argument("--dot", metavar="PREFIX")
    sp.set_defaults(func=cmd_bruteforce)

    sp = sub.add_parser("verify-stream", help="brute-force every graph in a graph6 stream")
    graph_arg(sp)
    sp.add_argument("--limit", type=int, default=16)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--timings", action="store_true")
    sp.add_argument("--human", action="store_true", help="print a summary to stderr")
    sp.set_defaults(func=cmd_verify_stream)

    sp = sub.add_parser("reducer", help="find, verify or enumerate P_t-reducers")
    rsub = sp.add_subparsers(dest="action", required=True)
    rp = rsub.add_parser("find", help="certified P_t-reducer near a vertex")
    graph_arg(rp)
    rp.add_argument("--vertex", type=int, default=0)
    rp.add_argument("--t", type=int, required=True)
    rp.add_argument("--radius", type=int, default=50, help="B_2 of the reducer must lie within this distance")
    rp.set_defaults(func=cmd_reducer_find)
    rp = rsub.add_parser("verify", help="re-check a reducer certificate")
    graph_arg(rp)
    rp.add_argument("certificate", help="JSON file written by 'reducer find' or 'reducer exhaustive'")
    rp.set_defaults(func=cmd_reducer_verify)
    rp = rsub.add_parser("exhaustive", help="every reducer inside a region of at most 12 vertices")
    graph_arg(rp)
    rp.add_argument("--region", required=True, metavar="V,V,...")
    rp.add_argument("--t", type=int, required=True)
    rp.add_argument("--half", action="store_true", help="look for half-reducers instead")
    rp.add_argument("--max-results", type=int, default=None)
    rp.set_defaults(func=cmd_reducer_exhaustive)

    sp = sub.add_parser("experiment", help="discrepancy concentration over seeds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seeds", default="0-9", help="e.g. 0-49 or 1,2,5")
    bounds(sp)
    sp.add_argument("--d", type=int, default=None, help="also classify balls of this radius")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--timings", action="store_true")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        out = Output(args.output)
    except OSError as exc:
        print(f"error: cannot open {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
