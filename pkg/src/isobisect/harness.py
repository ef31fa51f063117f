"""Random instances, the end-to-end pipeline, and the concentration experiment."""
from __future__ import annotations

import logging
import math
import time
from collections import deque
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field

import numpy as np

from .balance import (
    BalanceError,
    balance_all,
    greedy_repair,
    p2_closure_check,
    verify_isomorphic_bisection,
)
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
from .graph import CubicGraph, Graph, GraphError, connected_components
from .reducers import ConstructionError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
LEAK_MARGIN = 7  # affected components reach at most this far past a reducer's B_2
EXACT_DECOMPOSE_MAX_N = 16


class GenerationError(RuntimeError):
    pass


def random_cubic(n: int, seed: int, require_connected: bool = True, max_tries: int = 1000) -> CubicGraph:
    """Pairing model: match 3n half-edges uniformly, reject loops and multi-edges.

    Deterministic given ``seed``. Raises GenerationError after ``max_tries``
    rejections instead of looping forever.
    """
    if n < 4 or n % 2:
        raise ValueError("a cubic graph needs an even n >= 4")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        points = rng.permutation(3 * n) // 3
        u, w = points[0::2], points[1::2]
        if np.any(u == w):
            continue
        lo, hi = np.minimum(u, w), np.maximum(u, w)
        keys = lo.astype(np.int64) * n + hi
        if np.unique(keys).size != keys.size:
            continue
        order = np.argsort(keys)
        g = CubicGraph.from_edges(n, zip(lo[order].tolist(), hi[order].tolist()))
        if require_connected and len(connected_components(g)) != 1:
            continue
        return g
    raise GenerationError(f"no simple{' connected' if require_connected else ''} cubic graph in {max_tries} tries")


def girth_at_least(g: Graph, k: int) -> bool:
    """True iff no cycle shorter than ``k``; BFS to depth k//2 from every vertex."""
    depth = k // 2
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if dist[v] >= depth:
                continue
            for w in g.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w and dist[v] + dist[w] + 1 < k:
                    return False
    return True


# ---------------------------------------------------------------------------
# configuration and records


@dataclass
class PipelineConfig:
    seed: int
    d: int | None = None  # ball radius; None = adaptive
    l1: int = 5
    l2: int = 5
    radius_budget: int | None = None  # None = adaptive
    fallback: bool = True
    repair_budget: int = 2_000_000
    timings: bool = False
    include_colouring: bool = False

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a seed is required")
        for name in ("l1", "l2", "repair_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be positive")
        if self.radius_budget is not None and self.radius_budget < 1:
            raise ValueError("radius budget must be positive")


def adaptive_radius_budget(g: Graph) -> int:
    """Smallest budget the dispatcher can work in: the geodesic route needs
    B_2 of a 7-vertex path (radius 9) when girth >= 7, the general routes 50."""
    return 9 if girth_at_least(g, 7) else 50


def adaptive_d(radius_budget: int) -> int:
    return radius_budget + LEAK_MARGIN


@dataclass
class StageRecord:
    stage: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float | None = None


@dataclass
class PipelineReport:
    n: int
    seed: int
    status: str = "failure"  # "success" | "failure"
    route: str | None = None  # "balls" | "repair" | "mixed"
    failed_stage: str | None = None
    stages: list[StageRecord] = field(default_factory=list)
    components: int = 1
    certificate: dict | None = None
    colouring: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        out = asdict(self)
        out["stages"] = [{k: v for k, v in asdict(s).items() if v is not None} for s in self.stages]
        return out


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.t = time.perf_counter()

    def lap(self) -> float | None:
        now = time.perf_counter()
        dt, self.t = now - self.t, now
        return round(dt, 4) if self.enabled else None


def _decompose(g: Graph, cfg: PipelineConfig):
    if g.n <= EXACT_DECOMPOSE_MAX_N:
        try:
            pair = thomassen_decompose(g, cfg.l1, cfg.l2)
            if pair is not None:
                return pair, "exact"
        except SearchBudgetExceeded:
            pass
    return heuristic_decompose(g, cfg.l1, cfg.l2, seed=cfg.seed), "heuristic"


def _run_component(g: Graph, cfg: PipelineConfig, report: PipelineReport, tag: str = ""):
    """Run every stage on one connected cubic graph; returns (colouring, route) or (None, None)."""
    clock = _Clock(cfg.timings)
    stages = report.stages

    def stage(name, ok, **detail):
        stages.append(StageRecord(tag + name, ok, detail, clock.lap()))
        return ok

    pair, how = _decompose(g, cfg)
    if pair is None:
        stage("decompose", False, reason="no decomposition found")
        return None, None
    stage("decompose", True, method=how, max_len=[pair.max_len(0), pair.max_len(1)], l1=pair.l1, l2=pair.l2)

    phi = random_proper_coloring(g, pair, cfg.seed)
    delta = phi.imbalance
    stage("colour", True, imbalance=delta, discrepancy=_vec(path_discrepancies(g, phi)))
    try:
        bis, flipped = make_bisection(g, phi, pair)
    except BisectionError as exc:
        stage("bisect", False, reason=str(exc))
        return None, None
    stage("bisect", True, flipped=len(flipped), discrepancy=_vec(path_discrepancies(g, bis)))

    budget = cfg.radius_budget if cfg.radius_budget is not None else adaptive_radius_budget(g)
    d = cfg.d if cfg.d is not None else adaptive_d(budget)
    balls_ok = False
    result = None
    try:
        centres = select_separated_centres(g, d)
        census = classify_balls(g, bis, centres, d)
        pairing = pair_opposite_balls(census, bis)
        stage(
            "pair",
            True,
            d=d,
            radius_budget=budget,
            centres=len(centres),
            kappa=census.kappa,
            pairs=pairing.s,
            unmatched=len(pairing.unmatched),
        )
        if pairing.s == 0:
            stage("balance", False, reason="no ball pairs; graph too small for the ball machinery")
        else:
            result = balance_all(g, bis, pairing, radius_budget=min(budget, d - 1))
            balls_ok = result.ok
            stage("balance", result.ok, steps=len(result.steps), stage=result.stage, reason=result.reason)
    except (BallTooLargeError, GraphError) as exc:
        stage("pair", False, d=d, radius_budget=budget, reason=str(exc))
    except (BalanceError, ConstructionError) as exc:
        stage("balance", False, reason=f"{type(exc).__name__}: {exc}")
    if balls_ok:
        return result.colouring, "balls"
    if not cfg.fallback:
        return None, None
    start = bis
    rep = greedy_repair(g, start, pair, budget=cfg.repair_budget, seed=cfg.seed)
    stage("repair", rep.ok, phase=rep.phase, steps=rep.steps, objective=rep.objective, trajectory=rep.trajectory)
    if rep.ok:
        return rep.colouring, "repair"
    return None, None


def _vec(disc: dict[int, int]) -> list[int]:
    return [disc[t] for t in sorted(disc)]


def run_pipeline(g: Graph, cfg: PipelineConfig) -> tuple[VertexColoring | None, PipelineReport]:
    """decompose, colour, bisect, pair balls, balance, verify; repair on failure.

    Disconnected inputs run per component and are merged. Success is
    reported only with a certificate for the whole graph.
    """
    if any(len(a) != 3 for a in g.adj):
        raise GraphError("pipeline input must be cubic")
    report = PipelineReport(g.n, cfg.seed)
    comps = connected_components(g)
    report.components = len(comps)
    merged = bytearray(g.n)
    routes = set()
    for idx, comp in enumerate(comps):
        if len(comps) == 1:
            h, labels = g, list(range(g.n))
        else:
            h, labels = g.induced(comp)
            h = CubicGraph(h.adj)
        tag = f"c{idx}:" if len(comps) > 1 else ""
        col, route = _run_component(h, cfg, report, tag)
        if col is None:
            report.failed_stage = next((s.stage for s in reversed(report.stages) if not s.ok), "unknown")
            return None, report
        for i, v in enumerate(labels):
            merged[v] = col[i]
        routes.add(route)
    final = VertexColoring(bytes(merged))
    cert = verify_isomorphic_bisection(g, final)
    closure = p2_closure_check(g, final) if cert.ok else None
    report.stages.append(
        StageRecord("verify", cert.ok, {"status": cert.status, "reason": cert.reason, "closure": closure.ok if closure else None})
    )
    report.certificate = cert.to_json()
    if not cert.ok:
        report.failed_stage = "verify"
        return None, report
    report.status = "success"
    report.route = routes.pop() if len(routes) == 1 else "mixed"
    if cfg.include_colouring:
        report.colouring = final.to_json()
    return final, report


# ---------------------------------------------------------------------------
# concentration experiment


@dataclass
class ExperimentRecord:
    n: int
    seed: int
    discrepancy_before: list[int] = field(default_factory=list)  # t = 2..6, proper colouring
    discrepancy: list[int] = field(default_factory=list)  # t = 2..6, after bisection
    delta: int = 0
    kappa: int | None = None
    pairs: int | None = None
    d: int | None = None
    outcome: str = "ok"
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        return asdict(self)


def sqrt_n_log_n(n: int) -> float:
    return math.sqrt(n * math.log(n))


def concentration_record(n: int, seed: int, l1: int = 5, l2: int = 5, d: int | None = None) -> ExperimentRecord:
    t0 = time.perf_counter()
    rec = ExperimentRecord(n, seed, d=d)
    g = random_cubic(n, seed)
    pair = heuristic_decompose(g, l1, l2, seed=seed)
    if pair is None:
        rec.outcome = "decompose failed"
        rec.wall_time = time.perf_counter() - t0
        return rec
    phi = random_proper_coloring(g, pair, seed)
    rec.delta = phi.imbalance
    rec.discrepancy_before = [path_discrepancies(g, phi)[t] for t in range(2, 7)]
    try:
        bis, _ = make_bisection(g, phi, pair)
    except BisectionError as exc:
        rec.outcome = f"bisect failed: {exc}"
        rec.wall_time = time.perf_counter() - t0
        return rec
    disc = path_discrepancies(g, bis)
    rec.discrepancy = [disc[t] for t in range(2, 7)]
    if d is not None:
        census = classify_balls(g, bis, select_separated_centres(g, d), d)
        rec.kappa = census.kappa
        rec.pairs = pair_opposite_balls(census, bis).s
    rec.wall_time = time.perf_counter() - t0
    return rec


def summarise(records: Iterable[ExperimentRecord]) -> dict:
    """Pure function of the records: envelope hit rates and extremes."""
    recs = sorted(records, key=lambda r: (r.n, r.seed))
    done = [r for r in recs if r.outcome == "ok"]
    out: dict = {"runs": len(recs), "completed": len(done)}
    if not done:
        return out
    n = done[0].n
    s = sqrt_n_log_n(n)
    out["sqrt_n_log_n"] = s
    out["max_abs_discrepancy"] = [max(abs(r.discrepancy[i]) for r in done) for i in range(5)]
    out["max_abs_before"] = [max(abs(r.discrepancy_before[i]) for r in done) for i in range(5)]
    out["within_2_envelope_before"] = sum(all(abs(x) <= 2 * s for x in r.discrepancy_before) for r in done)
    out["within_3_envelope"] = sum(all(abs(x) <= 3 * s for x in r.discrepancy) for r in done)
    out["delta_within_tenth"] = sum(abs(r.delta) <= 0.1 * s for r in done)
    with_pairs = [r for r in done if r.pairs is not None]
    if with_pairs:
        d = with_pairs[0].d
        out["kappa"] = [r.kappa for r in with_pairs]
        out["pairs"] = [r.pairs for r in with_pairs]
        out["pair_bound"] = 2.0 ** (-2 * d - 5) * n
    return out


def concentration_experiment(n: int, seeds: Iterable[int], l1: int = 5, l2: int = 5, d: int | None = None, workers: int = 1):
    """Records for each seed plus their summary, ordered by seed."""
    seeds = list(seeds)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            records = list(ex.map(concentration_record, [n] * len(seeds), seeds, [l1] * len(seeds), [l2] * len(seeds), [d] * len(seeds)))
    else:
        records = [concentration_record(n, s, l1, l2, d) for s in seeds]
    records.sort(key=lambda r: (r.n, r.seed))
    return records, summarise(records)
