"""Brute-force ground truth for small graphs and small regions."""
from __future__ import annotations

import itertools
import time
from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import kernels
from .canon import path_form
from .census import BLUE, RED, VertexColoring, colour_censuses, region_census
from .graph import (
    Graph,
    GraphError,
    ball_of_set,
    connected_components,
    is_connected,
    sphere,
)
from .graph6 import Graph6Error, parse_graph6
from .reducers import HalfReducer, Reducer, verify_reducer

DEFAULT_LIMIT = 16
REGION_LIMIT = 12


class OracleLimitError(ValueError):
    pass


def is_isomorphic_bisection(g: Graph, colouring) -> bool:
    """Exact test: balanced, and both colour classes have the same component census."""
    col = VertexColoring.from_seq(colouring) if not isinstance(colouring, VertexColoring) else colouring
    if col.imbalance != 0:
        return False
    red, blue = colour_censuses(g, col)
    if red.has_oversized or blue.has_oversized:
        raise OracleLimitError("a component is too large to compare exactly")
    return red.same_multiset(blue)


def _check_limit(g: Graph, limit: int):
    if g.n > limit:
        raise OracleLimitError(f"graph has {g.n} vertices, limit is {limit}")


def _pruned_search(g: Graph) -> tuple[VertexColoring | None, int]:
    if g.n == 0:
        return VertexColoring(b""), 0
    if g.n % 2:
        return None, 0
    masks = kernels.bisection_candidates(g.adj_array, True).tolist()
    for mask in masks:
        col = VertexColoring.from_seq(BLUE - ((mask >> v) & 1) for v in range(g.n))
        if is_isomorphic_bisection(g, col):
            return col, len(masks)
    return None, len(masks)


def brute_force_bisection(g: Graph, limit: int = DEFAULT_LIMIT) -> VertexColoring | None:
    """First isomorphic bisection in colex order with vertex 0 red, or None.

    A cheap component invariant filters the balanced subsets before the exact
    census comparison. Swapping the colours of a solution gives a solution,
    so fixing vertex 0 red loses nothing. None means no isomorphic bisection
    exists.
    """
    _check_limit(g, limit)
    return _pruned_search(g)[0]


def brute_force_bisection_unpruned(g: Graph, limit: int = DEFAULT_LIMIT) -> VertexColoring | None:
    """Same question answered over every balanced subset with no filtering."""
    _check_limit(g, limit)
    if g.n % 2:
        return None
    for red in itertools.combinations(range(g.n), g.n // 2):
        col = VertexColoring.from_red_set(g.n, red)
        if is_isomorphic_bisection(g, col):
            return col
    return None


# ---------------------------------------------------------------------------
# graph6 streams


@dataclass
class GraphOutcome:
    index: int
    line: int
    n: int | None
    outcome: str  # "exists", "none" or "error"
    red: list[int] | None = None
    error: str | None = None
    seconds: float = 0.0
    candidates: int = 0

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "index": self.index,
            "line": self.line,
            "n": self.n,
            "outcome": self.outcome,
        }
        if self.red is not None:
            out["red"] = self.red
        if self.error is not None:
            out["error"] = self.error
        out["candidates"] = self.candidates
        if timings:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class VerificationReport:
    outcomes: list[GraphOutcome] = field(default_factory=list)

    @property
    def totals(self) -> dict[str, int]:
        c = Counter(o.outcome for o in self.outcomes)
        return {"graphs": len(self.outcomes), "exists": c["exists"], "none": c["none"], "error": c["error"]}

    @property
    def by_order(self) -> dict[int, dict[str, int]]:
        out: dict[int, Counter] = defaultdict(Counter)
        for o in self.outcomes:
            if o.n is not None:
                out[o.n][o.outcome] += 1
        return {n: dict(c) for n, c in sorted(out.items())}

    @property
    def all_exist(self) -> bool:
        return all(o.outcome == "exists" for o in self.outcomes)

    def to_json(self, timings: bool = False) -> dict:
        return {
            "totals": self.totals,
            "by_order": {str(n): c for n, c in self.by_order.items()},
            "graphs": [o.to_json(timings) for o in self.outcomes],
        }

    def summary_lines(self) -> list[str]:
        t = self.totals
        lines = [f"{t['graphs']} graphs: {t['exists']} with a bisection, {t['none']} without, {t['error']} errors"]
        for n, c in self.by_order.items():
            lines.append(f"  n={n}: " + ", ".join(f"{k}={v}" for k, v in sorted(c.items())))
        for o in self.outcomes:
            if o.outcome == "error":
                lines.append(f"  line {o.line}: {o.error}")
        return lines


def _check_one(job) -> GraphOutcome:
    index, lineno, text, limit = job
    start = time.perf_counter()
    try:
        g = parse_graph6(text, cubic=True)
        if not is_connected(g):
            raise GraphError("graph is not connected")
        _check_limit(g, limit)
        col, candidates = _pruned_search(g)
    except (Graph6Error, GraphError, OracleLimitError) as exc:
        return GraphOutcome(index, lineno, None, "error", error=str(exc), seconds=time.perf_counter() - start)
    elapsed = time.perf_counter() - start
    if col is None:
        return GraphOutcome(index, lineno, g.n, "none", seconds=elapsed, candidates=candidates)
    return GraphOutcome(index, lineno, g.n, "exists", red=col.red(), seconds=elapsed, candidates=candidates)


def verify_conjecture_stream(
    lines: Iterable[str], limit: int = DEFAULT_LIMIT, workers: int = 1
) -> VerificationReport:
    """Brute-force every graph6 line; bad lines are recorded and skipped over.

    Blank lines and the optional ``>>graph6<<`` header are ignored. Results
    keep input order whatever the number of workers.
    """
    jobs = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        jobs.append((len(jobs), lineno, text, limit))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_check_one, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        outcomes = [_check_one(j) for j in jobs]
    return VerificationReport(outcomes)


# ---------------------------------------------------------------------------
# reducers by exhaustion


def connected_subsets(g: Graph, region: Sequence[int], min_size: int = 1) -> list[tuple[int, ...]]:
    """Every vertex subset of ``region`` inducing a connected subgraph."""
    region = sorted(set(region))
    out = []
    for k in range(max(1, min_size), len(region) + 1):
        for sub in itertools.combinations(region, k):
            if len(connected_components(g, sub)) == 1:
                out.append(sub)
    return out


def exhaustive_reducer_search(
    g: Graph,
    region: Sequence[int],
    t: int,
    half: bool = False,
    min_size: int = 1,
    max_results: int | None = None,
) -> list[Reducer]:
    """All certified (half-)reducers whose vertex set lies in ``region``.

    For each connected induced R, every colouring of R is combined with the
    pinned boundary (N(R) blue, N^2(R) red) and the census of the whole of
    B_2(R) is taken. Two colourings can only form a reducer when they agree
    on every component type other than short paths and on blue P_t, so
    colourings are grouped on that part and only pairs inside a group with
    the right red totals are handed to :func:`verify_reducer`. Every
    returned candidate passed the verifier.
    """
    region = sorted(set(region))
    if len(region) > REGION_LIMIT:
        raise OracleLimitError(f"region has {len(region)} vertices, limit is {REGION_LIMIT}")
    shift = 1 if half else 0
    cls = HalfReducer if half else Reducer
    small = {path_form(k) for k in range(1, t + 1)}
    pt = path_form(t)
    found: list[Reducer] = []
    key_cache: dict = {}
    for R in connected_subsets(g, region, min_size):
        n1 = sphere(g, R, 1)
        n2 = sphere(g, R, 2)
        ball2 = ball_of_set(g, R, 2)
        groups: dict = defaultdict(lambda: defaultdict(list))
        colourings = []
        for mask in range(1 << len(R)):
            psi = {v: RED for v in ball2}
            for v in n1:
                psi[v] = BLUE
            for v in n2:
                psi[v] = RED
            for i, v in enumerate(R):
                psi[v] = (mask >> i) & 1
            red, blue = region_census(g, psi, ball2)
            fixed = (
                frozenset((k, c) for k, c in red.counts.items() if k not in small),
                frozenset((k, c) for k, c in blue.counts.items() if k not in small),
                blue[pt],
            )
            reds = sum(1 for c in psi.values() if c == RED)
            colourings.append((psi, fixed, reds, red[pt]))
            groups[fixed][(reds, red[pt])].append(mask)
        for psi1, fixed, reds, rpt in colourings:
            for m2 in groups[fixed].get((reds - shift, rpt - 1), ()):
                cand = cls(tuple(R), t, psi1, colourings[m2][0], "exhaustive")
                verdict = verify_reducer(g, cand, key_cache)
                if not verdict.ok:
                    raise AssertionError(f"exhaustive pair rejected at ({verdict.clause}): {verdict.reason}")
                cand.verdict = verdict
                found.append(cand)
                if max_results is not None and len(found) >= max_results:
                    return found
    return found


def reducer_signature(reducer: Reducer) -> tuple:
    """Census change of a certified reducer in a comparable form."""
    v = reducer.verdict
    return (tuple(sorted(v.red_delta.items())), tuple(sorted(v.blue_delta.items())))
