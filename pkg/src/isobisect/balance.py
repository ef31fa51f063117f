"""Stage two: even out short-path counts and certify the final bisection."""
from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .canon import describe, path_form, path_order
from .census import (
    BLUE,
    OVERSIZED,
    RED,
    ComponentCensus,
    VertexColoring,
    colour_censuses,
    component_key,
)
from .coloring import BallPair, BallPairing, is_proper_on
from .decompose import LinearForestPair
from .graph import Graph, ball
from .graph6 import parse_graph6
from .reducers import MAX_T, MIN_T, Reducer, find_reducer

log = logging.getLogger(__name__)


class BalanceError(RuntimeError):
    """A balancing step could not be carried out as specified."""


# ---------------------------------------------------------------------------
# certificates


@dataclass
class BisectionCertificate:
    status: str  # "certified" | "refuted" | "undecided"
    reason: str = ""
    red: dict[str, int] = field(default_factory=dict)
    blue: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "red": self.red, "blue": self.blue}


def verify_isomorphic_bisection(g: Graph, colouring) -> BisectionCertificate:
    """Certify that the two colour classes induce isomorphic subgraphs.

    Equal multisets of components (by canonical form) is both necessary and
    sufficient. Components beyond the canonical-form limit are compared by
    size and degree sequence only; if those agree the answer is
    "undecided", never "certified".
    """
    col = VertexColoring.from_seq(colouring) if not isinstance(colouring, VertexColoring) else colouring
    if col.n != g.n:
        return BisectionCertificate("refuted", f"colouring covers {col.n} of {g.n} vertices")
    if col.imbalance != 0:
        return BisectionCertificate("refuted", f"not a bisection: #red - #blue = {col.imbalance}")
    red, blue = colour_censuses(g, col)
    rj, bj = red.to_json(), blue.to_json()
    small_r = {k: v for k, v in red.counts.items() if k != OVERSIZED}
    small_b = {k: v for k, v in blue.counts.items() if k != OVERSIZED}
    if small_r != small_b:
        diff = sorted(set(small_r.items()) ^ set(small_b.items()))
        k = diff[0][0]
        return BisectionCertificate(
            "refuted", f"{describe(k)}: {small_r.get(k, 0)} red vs {small_b.get(k, 0)} blue", rj, bj
        )
    if red.has_oversized or blue.has_oversized:
        def shapes(comps):
            return sorted((len(c), tuple(sorted(_degrees(g, c)))) for c in comps)

        if shapes(red.oversized) != shapes(blue.oversized):
            return BisectionCertificate("refuted", "large components differ in size or degrees", rj, bj)
        return BisectionCertificate("undecided", "large components agree on degrees; no exact test", rj, bj)
    return BisectionCertificate("certified", "", rj, bj)


def _degrees(g: Graph, comp) -> list[int]:
    s = set(comp)
    return [sum(1 for w in g.adj[v] if w in s) for v in comp]


@lru_cache(maxsize=4096)
def _form_shape(form: bytes) -> tuple[int, int]:
    """(vertices, edges) of the graph behind a canonical form."""
    k = path_order(form)
    if k is not None:
        return k, k - 1
    h = parse_graph6(form.split(b"|")[0].decode("ascii"))
    return h.n, h.edge_count


@dataclass
class ClosureReport:
    ok: bool
    reason: str = ""
    d1: int = 0
    d2: int = 0


def p2_closure_check(g: Graph, colouring, censuses: tuple[ComponentCensus, ComponentCensus] | None = None) -> ClosureReport:
    """Deduce r_P1 = b_P1 and r_P2 = b_P2 from all other counts agreeing.

    With other components balanced, vertex counting gives D1 + 2 D2 = 0
    and, since a bisection of a cubic graph has as many red-red as
    blue-blue edges, edge counting gives D2 = 0. The census totals are
    cross-checked against direct counts so a corrupted census is flagged.
    """
    col = list(colouring)
    n_red = col.count(RED)
    if 2 * n_red != g.n:
        raise ValueError("closure check needs a bisection")
    red, blue = censuses if censuses is not None else colour_censuses(g, col)
    p1, p2 = path_form(1), path_form(2)
    others = (set(red.counts) | set(blue.counts)) - {p1, p2}
    for k in sorted(others):
        if red[k] != blue[k]:
            raise ValueError(f"precondition: {describe(k)} is unbalanced ({red[k]} vs {blue[k]})")

    e_red = sum(1 for u, w in g.edges if col[u] == RED and col[w] == RED)
    e_blue = sum(1 for u, w in g.edges if col[u] == BLUE and col[w] == BLUE)
    cut = g.edge_count - e_red - e_blue
    if 2 * e_red != 3 * n_red - cut or 2 * e_blue != 3 * (g.n - n_red) - cut:
        return ClosureReport(False, "edge identity fails; graph is not cubic")
    if e_red != e_blue:
        return ClosureReport(False, f"red edges {e_red} != blue edges {e_blue}")
    for name, cen, nv, ne in (("red", red, n_red, e_red), ("blue", blue, g.n - n_red, e_blue)):
        tv = te = 0
        for k, c in cen.counts.items():
            if k == OVERSIZED:
                continue
            a, b = _form_shape(k)
            tv += a * c
            te += b * c
        for comp in cen.oversized:
            tv += len(comp)
            te += sum(_degrees(g, comp)) // 2
        if (tv, te) != (nv, ne):
            return ClosureReport(False, f"{name} census totals ({tv} vertices, {te} edges) disagree with the colouring ({nv}, {ne})")
    d1 = red[p1] - blue[p1]
    d2 = red[p2] - blue[p2]
    if d1 or d2:
        return ClosureReport(False, f"internal inconsistency: P1 off by {d1}, P2 off by {d2}", d1, d2)
    return ClosureReport(True, "", 0, 0)


# ---------------------------------------------------------------------------
# paired-ball balancing


def discrepancy_vector(g: Graph, colouring, max_t: int = MAX_T) -> dict[int, int]:
    red, blue = colour_censuses(g, colouring)
    return {t: red.path_count(t) - blue.path_count(t) for t in range(1, max_t + 1)}


@dataclass
class BalanceState:
    colouring: VertexColoring
    discrepancy: dict[int, int]
    queue: deque
    steps: list[dict] = field(default_factory=list)

    @classmethod
    def start(cls, g: Graph, colouring: VertexColoring, pairing: BallPairing) -> BalanceState:
        if colouring.imbalance != 0:
            raise ValueError("balancing needs a bisection")
        return cls(colouring, discrepancy_vector(g, colouring), deque(pairing.pairs))

    def check(self, g: Graph) -> None:
        """Recompute from scratch and compare; raises on drift."""
        if self.colouring.imbalance != 0:
            raise BalanceError("bisection lost")
        fresh = discrepancy_vector(g, self.colouring)
        if fresh != self.discrepancy:
            raise BalanceError(f"tracked discrepancy {self.discrepancy} != recomputed {fresh}")


def _affected_keys(g: Graph, col, touched: set[int]) -> Counter:
    """Signed census (+red, -blue) of every component meeting ``touched``."""
    seen: set[int] = set()
    out: Counter = Counter()
    for s in sorted(touched):
        if s in seen:
            continue
        c = col[s]
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w not in seen and col[w] == c:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out[component_key(g, sorted(comp))] += 1 if c == RED else -1
    return out


def apply_reducer_pair(
    g: Graph, state: BalanceState, pair: BallPair, reducer: Reducer, direction: str, d: int
) -> BalanceState:
    """Recolour B_2(R) with psi2 and the mirrored B_2(R) with opposite psi1.

    ``direction`` is "red" when red P_t is in surplus; for "blue" the
    whole construction runs with colours exchanged. The change is checked
    locally: only short paths up to P_t may move, and D_t moves one step
    towards zero.
    """
    if direction not in ("red", "blue"):
        raise ValueError("direction must be 'red' or 'blue'")
    red = reducer if direction == "red" else reducer.opposite()
    t = red.t
    inner = set(ball(g, pair.u, d - 1))
    region = set(red.psi1)
    if not region <= inner:
        raise BalanceError(f"reducer region escapes B_{d - 1}({pair.u})")
    col = bytearray(state.colouring.colours)
    for a in ball(g, pair.u, d):
        if col[a] == col[pair.mapping[a]]:
            raise BalanceError(f"balls at {pair.u} and {pair.w} are not oppositely coloured at {a}")
    updates = {}
    for v in region:
        updates[v] = red.psi2[v]
        updates[pair.mapping[v]] = 1 - red.psi1[v]
    touched = {v for v, c in updates.items() if col[v] != c}
    near = set(touched)
    for v in touched:
        near.update(g.adj[v])
    before = _affected_keys(g, col, near)
    for v, c in updates.items():
        col[v] = c
    after = _affected_keys(g, col, near)
    delta = after.copy()
    delta.subtract(before)
    delta = {k: v for k, v in delta.items() if v}
    for k, v in delta.items():
        if k == OVERSIZED:
            raise BalanceError("an affected component exceeds the canonical-form limit")
        order = path_order(k)
        if order is None or order > t:
            raise BalanceError(f"{describe(k)} balance moved by {v}")
    want = -1 if direction == "red" else +1
    if delta.get(path_form(t), 0) != want:
        raise BalanceError(f"P{t} discrepancy moved by {delta.get(path_form(t), 0)}, expected {want}")
    new_col = VertexColoring(bytes(col))
    if new_col.imbalance != 0:
        raise BalanceError("bisection lost")
    disc = dict(state.discrepancy)
    for k, v in delta.items():
        disc[path_order(k)] = disc.get(path_order(k), 0) + v
    state.steps.append(
        {
            "t": t,
            "direction": direction,
            "u": pair.u,
            "w": pair.w,
            "R": list(reducer.R),
            "provenance": reducer.provenance,
            "recoloured": len(touched),
            "discrepancy": [disc.get(k, 0) for k in range(MIN_T - 1, MAX_T + 1)],
        }
    )
    state.colouring = new_col
    state.discrepancy = disc
    return state


@dataclass
class BalanceResult:
    ok: bool
    colouring: VertexColoring
    steps: list[dict]
    stage: str = ""
    reason: str = ""
    certificate: BisectionCertificate | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "stage": self.stage,
            "reason": self.reason,
            "steps": self.steps,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def balance_all(
    g: Graph,
    colouring: VertexColoring,
    pairing: BallPairing,
    radius_budget: int | None = None,
    reducer_source=None,
    check_every: int = 0,
) -> BalanceResult:
    """Zero D_t for t = 6, 5, 4, 3 in turn, one fresh ball pair per step.

    ``reducer_source(g, u, t)`` may supply reducers; by default the
    dispatcher is asked for one inside B_{d-1}(u). With ``check_every``
    the tracked state is recomputed from scratch every so many steps.
    """
    d = pairing.d
    budget = d - 1 if radius_budget is None else radius_budget
    source = reducer_source or (lambda gg, u, t: find_reducer(gg, u, t, budget))
    state = BalanceState.start(g, colouring, pairing)
    for t in range(MAX_T, MIN_T - 1, -1):
        larger = {k: state.discrepancy.get(k, 0) for k in range(t + 1, MAX_T + 1)}
        while state.discrepancy.get(t, 0) != 0:
            if not state.queue:
                return BalanceResult(False, state.colouring, state.steps, "pairs", f"ball pairs exhausted at t={t}")
            pair = state.queue.popleft()
            red = source(g, pair.u, t)
            if red is None:
                return BalanceResult(False, state.colouring, state.steps, "reducer", f"no P{t}-reducer near {pair.u}")
            direction = "red" if state.discrepancy[t] > 0 else "blue"
            try:
                apply_reducer_pair(g, state, pair, red, direction, d)
            except BalanceError as exc:
                return BalanceResult(False, state.colouring, state.steps, "apply", str(exc))
            if any(state.discrepancy.get(k, 0) != v for k, v in larger.items()):
                raise BalanceError(f"a step for t={t} disturbed a larger path count")
            if check_every and len(state.steps) % check_every == 0:
                state.check(g)
    state.check(g)
    try:
        closure = p2_closure_check(g, state.colouring)
    except ValueError as exc:
        return BalanceResult(False, state.colouring, state.steps, "closure", str(exc))
    if not closure.ok:
        return BalanceResult(False, state.colouring, state.steps, "closure", closure.reason)
    cert = verify_isomorphic_bisection(g, state.colouring)
    return BalanceResult(cert.ok, state.colouring, state.steps, "" if cert.ok else "verify", cert.reason, cert)


# ---------------------------------------------------------------------------
# fallback: local search


@dataclass
class RepairResult:
    ok: bool
    colouring: VertexColoring
    certificate: BisectionCertificate | None
    objective: int
    steps: int
    phase: str
    trajectory: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "objective": self.objective,
            "steps": self.steps,
            "phase": self.phase,
            "trajectory": self.trajectory,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def _path_arrays(pair: LinearForestPair, n: int):
    f2 = pair.paths_of(1)
    ptr2 = np.cumsum([0] + [len(p) for p in f2]).astype(np.int64)
    verts2 = np.fromiter((v for p in f2 for v in p), dtype=np.int64, count=n)
    f2_of = np.empty(n, dtype=np.int64)
    for j, p in enumerate(f2):
        f2_of[p] = j
    f1 = pair.paths_of(0)
    ptr1 = np.cumsum([0] + [len(p) for p in f1]).astype(np.int64)
    verts1 = np.fromiter((v for p in f1 for v in p), dtype=np.int64, count=n)
    return ptr2, verts2, f2_of, ptr1, verts1


def census_distance(g: Graph, colouring) -> tuple[int, ...]:
    """(|D6|, ..., |D3|, sum over all component types of |r_H - b_H|)."""
    red, blue = colour_censuses(g, colouring)
    keys = set(red.counts) | set(blue.counts)
    total = sum(abs(red[k] - blue[k]) for k in keys)
    total += abs(len(red.oversized) - len(blue.oversized))
    return tuple(abs(red.path_count(t) - blue.path_count(t)) for t in range(MAX_T, MIN_T - 1, -1)) + (total,)


def _swap_search(g: Graph, col: bytearray, budget: int, rng: np.random.Generator) -> tuple[bytearray, tuple]:
    """Hill-climb on red/blue vertex swaps with the lexicographic census objective."""
    best = census_distance(g, col)
    for _ in range(budget):
        if best[-1] == 0:
            break
        reds = [v for v in range(g.n) if col[v] == RED]
        blues = [v for v in range(g.n) if col[v] == BLUE]
        a = reds[int(rng.integers(len(reds)))]
        b = blues[int(rng.integers(len(blues)))]
        col[a], col[b] = BLUE, RED
        new = census_distance(g, col)
        if new < best or (new == best and rng.random() < 0.3):
            best = new
        else:
            col[a], col[b] = RED, BLUE
    return col, best


def greedy_repair(
    g: Graph,
    colouring: VertexColoring,
    pair: LinearForestPair | None,
    budget: int = 2_000_000,
    seed: int = 0,
    restarts: int = 4,
    swap_limit: int = 64,
    swap_budget: int = 20_000,
) -> RepairResult:
    """Local search for an isomorphic bisection, starting from ``colouring``.

    Phase one flips whole F1 paths (keeping the colouring proper on F1 and
    the bisection intact) until every r_{P_k} = b_{P_k}, k >= 3, along
    the F2 paths. If that stalls and the graph has at most ``swap_limit``
    vertices, phase two swaps single red/blue vertex pairs. Success is
    only ever reported together with a certificate.
    """
    if colouring.imbalance != 0:
        raise ValueError("greedy repair needs a bisection")
    cert = verify_isomorphic_bisection(g, colouring)
    if cert.ok:
        return RepairResult(True, colouring, cert, 0, 0, "input")
    col = np.asarray(colouring, dtype=np.int8)
    steps_used = 0
    trajectory: list[int] = []
    current = colouring
    if pair is not None and is_proper_on(pair, colouring.colours):
        arrays = _path_arrays(pair, g.n)
        kmax = pair.max_len(1) + 1
        for attempt in range(restarts):
            s = (seed * 2_654_435_761 + attempt) & 0xFFFFFFFFFFFFFFFF
            col, obj, steps = kernels.repair_paths(col, *arrays, kmax, s, budget, 300)
            steps_used += int(steps)
            trajectory.append(int(obj))
            current = VertexColoring.from_array(col)
            if obj == 0:
                cert = verify_isomorphic_bisection(g, current)
                if cert.ok:
                    return RepairResult(True, current, cert, 0, steps_used, "path-flips", trajectory)
                log.warning("path-flip objective reached 0 without a certificate: %s", cert.reason)
                break
    if g.n <= swap_limit:
        rng = np.random.default_rng(seed)
        work = bytearray(current.colours)
        for attempt in range(restarts):
            work, best = _swap_search(g, work, swap_budget, rng)
            steps_used += swap_budget
            trajectory.append(int(best[-1]))
            current = VertexColoring(bytes(work))
            cert = verify_isomorphic_bisection(g, current)
            if cert.ok:
                return RepairResult(True, current, cert, 0, steps_used, "swaps", trajectory)
    cert = verify_isomorphic_bisection(g, current)
    obj = census_distance(g, current)[-1]
    return RepairResult(cert.ok, current, cert, int(obj), steps_used, "exhausted", trajectory)
