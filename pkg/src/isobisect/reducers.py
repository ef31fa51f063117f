"""Local recolouring gadgets that trade one red P_t for shorter paths.

A reducer is a vertex set R with two colourings psi1, psi2 of B_2(R).
Both colour N(R) blue and N^2(R) red, so nothing outside B_2(R) can see
the difference. Between psi1 and psi2 the red and blue component censuses
may change only on short paths, and exactly one red P_t disappears.

Constructions here follow the standard recipes (geodesic paths in high
girth, chord vertices on induced paths, unbalanced pairs glued into a
composite). Where a recipe fixes R but not the colouring, the colouring
is found by exhaustive search over 2^|R| colourings of R with the
boundary pinned. Every value handed out has passed :func:`verify_reducer`.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .canon import describe, path_form, path_order
from .census import BLUE, OVERSIZED, RED, component_key, local_components
from .graph import (
    Graph,
    ball_of_set,
    bfs_distances,
    find_geodesic_of_length,
    geodesic,
    girth,
    is_geodesic,
    is_induced_path,
    sphere,
)

MIN_T, MAX_T = 3, 6
DEFAULT_RADIUS_BUDGET = 50
SEARCH_LIMIT = 12  # largest R the colouring search will enumerate


class ConstructionError(RuntimeError):
    """A construction whose existence is guaranteed came up empty.

    Raised instead of returning None so a broken guarantee is never
    mistaken for a graph that simply lacks room.
    """


@dataclass
class Verdict:
    ok: bool
    clause: str | None = None
    reason: str = ""
    transcript: list[str] = field(default_factory=list)
    red_delta: dict[bytes, int] = field(default_factory=dict)
    blue_delta: dict[bytes, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class Reducer:
    """Vertex set ``R`` with colourings ``psi1``/``psi2`` of ``B_2(R)``.

    ``red_shift`` is the required number of extra red vertices in psi1
    (0 for a reducer, 1 for a half-reducer).
    """

    R: tuple[int, ...]
    t: int
    psi1: dict[int, int]
    psi2: dict[int, int]
    provenance: str = ""
    verdict: Verdict | None = None

    red_shift = 0
    kind = "reducer"

    @property
    def region(self) -> list[int]:
        return sorted(self.psi1)

    def opposite(self) -> Reducer:
        """Same gadget with red and blue exchanged in both colourings."""
        return type(self)(
            self.R,
            self.t,
            {v: 1 - c for v, c in self.psi1.items()},
            {v: 1 - c for v, c in self.psi2.items()},
            self.provenance + " (opposite)",
        )

    def radius_from(self, g: Graph, v: int) -> int:
        dist = bfs_distances(g, [v])
        return max(dist[u] for u in self.psi1)

    def to_json(self) -> dict:
        region = self.region
        out = {
            "kind": self.kind,
            "t": self.t,
            "R": list(self.R),
            "region": region,
            "psi1": "".join("RB"[self.psi1[v]] for v in region),
            "psi2": "".join("RB"[self.psi2[v]] for v in region),
            "provenance": self.provenance,
        }
        if self.verdict is not None:
            out["verifier"] = {
                "ok": self.verdict.ok,
                "clause": self.verdict.clause,
                "transcript": self.verdict.transcript,
                "red_delta": {describe(k): d for k, d in sorted(self.verdict.red_delta.items())},
                "blue_delta": {describe(k): d for k, d in sorted(self.verdict.blue_delta.items())},
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> Reducer:
        kind = HalfReducer if data.get("kind") == "half" else Reducer
        region = data["region"]
        psi1 = {v: "RB".index(c) for v, c in zip(region, data["psi1"])}
        psi2 = {v: "RB".index(c) for v, c in zip(region, data["psi2"])}
        return kind(tuple(data["R"]), int(data["t"]), psi1, psi2, data.get("provenance", ""))


@dataclass
class HalfReducer(Reducer):
    """Like a reducer, but psi1 has exactly one more red vertex than psi2."""

    red_shift = 1
    kind = "half"


# ---------------------------------------------------------------------------
# verification


def _signed_delta(before: Iterable[bytes], after: Iterable[bytes]) -> dict[bytes, int]:
    d: Counter = Counter(after)
    d.subtract(Counter(before))
    return {k: v for k, v in d.items() if v}


def _is_short_path(key: bytes, t: int) -> bool:
    k = path_order(key)
    return k is not None and 1 <= k <= t


def verify_reducer(g: Graph, cand: Reducer, key_cache: dict | None = None) -> Verdict:
    """Check a candidate clause by clause; the verdict names the first failure.

    Only components whose vertex set or colour differs between psi1 and
    psi2 are canonicalised; identical components cancel in every count.
    """
    log: list[str] = []
    R = set(cand.R)
    t = cand.t

    def fail(clause, reason):
        log.append(f"({clause}) FAIL: {reason}")
        return Verdict(False, clause, reason, log)

    if not R:
        return fail("domain", "R is empty")
    if not MIN_T <= t <= MAX_T + 10:
        return fail("domain", f"t={t} out of range")
    if any(not 0 <= v < g.n for v in R):
        return fail("domain", "R has a vertex outside the graph")
    region = set(ball_of_set(g, R, 2))
    n1 = sphere(g, R, 1)
    n2 = sphere(g, R, 2)
    for name, psi in (("psi1", cand.psi1), ("psi2", cand.psi2)):
        if set(psi) != region:
            return fail("domain", f"{name} is not defined exactly on B_2(R)")
        if any(c not in (RED, BLUE) for c in psi.values()):
            return fail("domain", f"{name} uses a colour other than red/blue")
    log.append(f"domain ok: |R|={len(R)}, |B_2(R)|={len(region)}")

    red1 = sum(1 for c in cand.psi1.values() if c == RED)
    red2 = sum(1 for c in cand.psi2.values() if c == RED)
    clause_i = "i'" if cand.red_shift else "i"
    if red1 - red2 != cand.red_shift:
        return fail(clause_i, f"psi1 has {red1} red, psi2 has {red2}, need difference {cand.red_shift}")
    log.append(f"({clause_i}) ok: red counts {red1}, {red2}")

    for name, psi in (("psi1", cand.psi1), ("psi2", cand.psi2)):
        bad = [v for v in n1 if psi[v] != BLUE]
        if bad:
            return fail("ii", f"{name} colours N(R) vertex {bad[0]} red")
        bad = [v for v in n2 if psi[v] != RED]
        if bad:
            return fail("ii", f"{name} colours N^2(R) vertex {bad[0]} blue")
    log.append("(ii) ok: N(R) blue, N^2(R) red in both")

    comps1 = set(local_components(g, cand.psi1, region))
    comps2 = set(local_components(g, cand.psi2, region))
    only1 = comps1 - comps2
    only2 = comps2 - comps1
    cache = key_cache if key_cache is not None else {}

    def key(verts):
        k = cache.get(verts)
        if k is None:
            k = cache[verts] = component_key(g, verts)
        return k

    keyed1 = [(c, key(vs)) for c, vs in sorted(only1)]
    keyed2 = [(c, key(vs)) for c, vs in sorted(only2)]
    if any(k == OVERSIZED for _, k in keyed1 + keyed2):
        return fail("iii", "a changed component exceeds the canonical-form limit")
    red_delta = _signed_delta([k for c, k in keyed1 if c == RED], [k for c, k in keyed2 if c == RED])
    blue_delta = _signed_delta([k for c, k in keyed1 if c == BLUE], [k for c, k in keyed2 if c == BLUE])
    for colour, delta in (("red", red_delta), ("blue", blue_delta)):
        for k, d in sorted(delta.items()):
            if not _is_short_path(k, t):
                v = fail("iii", f"{colour} count of {describe(k)} changes by {d}")
                v.red_delta, v.blue_delta = red_delta, blue_delta
                return v
    log.append(
        "(iii) ok: changes only on short paths; red "
        + _fmt(red_delta)
        + ", blue "
        + _fmt(blue_delta)
    )

    pt = path_form(t)
    if red_delta.get(pt, 0) != -1:
        v = fail("iv", f"red P{t} changes by {red_delta.get(pt, 0)}, need -1")
        v.red_delta, v.blue_delta = red_delta, blue_delta
        return v
    if blue_delta.get(pt, 0) != 0:
        v = fail("iv", f"blue P{t} changes by {blue_delta[pt]}, need 0")
        v.red_delta, v.blue_delta = red_delta, blue_delta
        return v
    log.append(f"(iv) ok: one red P{t} lost, blue P{t} unchanged")
    return Verdict(True, None, "", log, red_delta, blue_delta)


def _fmt(delta: Mapping[bytes, int]) -> str:
    if not delta:
        return "{}"
    return "{" + ", ".join(f"{describe(k)}:{d:+d}" for k, d in sorted(delta.items(), key=lambda kv: describe(kv[0]))) + "}"


def certify(g: Graph, cand: Reducer) -> Reducer:
    """Attach a passing verdict or raise AssertionError."""
    verdict = verify_reducer(g, cand)
    if not verdict.ok:
        raise AssertionError(f"{cand.provenance}: clause ({verdict.clause}) {verdict.reason}")
    cand.verdict = verdict
    return cand


# ---------------------------------------------------------------------------
# colouring search with the boundary pinned


def path_delta(red: Mapping[int, int] | None = None, blue: Mapping[int, int] | None = None):
    """Expected census change psi1 -> psi2, keyed by path order."""

    def conv(d):
        out: Counter = Counter()
        for k, v in (d or {}).items():
            out[path_form(k)] += v
        return {k: v for k, v in out.items() if v}

    return conv(red), conv(blue)


def search_colourings(
    g: Graph,
    R: Sequence[int],
    t: int,
    half: bool = False,
    prefer: tuple[dict, dict] | None = None,
    provenance: str = "search",
) -> Reducer | None:
    """Find psi1, psi2 making ``R`` a (half-)reducer, or None if none exist.

    N(R) is blue and N^2(R) red in every candidate, so only components
    meeting R or N(R) vary; they all live in the subgraph induced on
    R + N(R). Colourings are bucketed by the part of their census that
    must not change, so pairs are found without a quadratic scan.
    With ``prefer`` (red and blue deltas from :func:`path_delta`) a pair
    with exactly that census change is taken if one exists.
    """
    R = sorted(set(R))
    if len(R) > SEARCH_LIMIT:
        raise ValueError(f"|R|={len(R)} exceeds the search limit {SEARCH_LIMIT}")
    n1 = sphere(g, R, 1)
    n2 = sphere(g, R, 2)
    inner = R + n1
    base = {v: BLUE for v in n1}
    base.update({v: RED for v in n2})
    shift = 1 if half else 0
    small = {path_form(k) for k in range(1, t + 1)}
    pt = path_form(t)
    cache: dict = {}

    def key(verts):
        k = cache.get(verts)
        if k is None:
            k = cache[verts] = component_key(g, verts)
        return k

    sigs = []
    buckets: dict = defaultdict(lambda: defaultdict(list))
    for mask in range(1 << len(R)):
        col = dict(base)
        for i, v in enumerate(R):
            col[v] = (mask >> i) & 1
        reds = len(R) - bin(mask).count("1")
        counts: Counter = Counter()
        for c, verts in local_components(g, col, inner):
            counts[(c, key(verts))] += 1
        rest = frozenset((ck, n) for ck, n in counts.items() if ck[1] not in small)
        bucket = (rest, counts[(BLUE, pt)])
        rpt = counts[(RED, pt)]
        sigs.append((reds, rpt, bucket, counts))
        buckets[bucket][(reds, rpt)].append(mask)

    def matches(c1, c2):
        want_red, want_blue = prefer
        got_red = _signed_delta(
            [k for (c, k), n in c1.items() if c == RED for _ in range(n)],
            [k for (c, k), n in c2.items() if c == RED for _ in range(n)],
        )
        got_blue = _signed_delta(
            [k for (c, k), n in c1.items() if c == BLUE for _ in range(n)],
            [k for (c, k), n in c2.items() if c == BLUE for _ in range(n)],
        )
        return got_red == want_red and got_blue == want_blue

    passes = [True, False] if prefer is not None else [False]
    for strict in passes:
        for m1, (reds, rpt, bucket, counts) in enumerate(sigs):
            for m2 in buckets[bucket].get((reds - shift, rpt - 1), ()):
                if strict and not matches(counts, sigs[m2][3]):
                    continue
                psi1 = dict(base)
                psi2 = dict(base)
                for i, v in enumerate(R):
                    psi1[v] = (m1 >> i) & 1
                    psi2[v] = (m2 >> i) & 1
                cls = HalfReducer if half else Reducer
                return certify(g, cls(tuple(R), t, psi1, psi2, provenance))
    return None


# ---------------------------------------------------------------------------
# girth >= 7: a geodesic is a reducer


def neighbourhood_independent(g: Graph, P: Sequence[int]) -> bool:
    """True iff the external neighbourhood of ``P`` spans no edge."""
    nbhd = set(sphere(g, P, 1))
    return not any(w in nbhd for v in nbhd for w in g.adj[v])


def geodesic_colourings(g: Graph, P: Sequence[int], t: int) -> Reducer:
    """Path all red except one blue vertex: v_t in psi1, v_{t-1} in psi2."""
    region = ball_of_set(g, P, 2)
    base = {v: RED for v in region}
    for v in sphere(g, P, 1):
        base[v] = BLUE
    psi1, psi2 = dict(base), dict(base)
    psi1[P[t]] = BLUE
    psi2[P[t - 1]] = BLUE
    return Reducer(tuple(sorted(P)), t, psi1, psi2, f"geodesic from {P[0]} to {P[-1]}")


def geodesic_reducer(g: Graph, v: int, t: int, check_girth: bool = True) -> Reducer | None:
    """Reducer on a geodesic of length t+1 from ``v``; None if ``v`` has eccentricity <= t.

    With ``check_girth`` the girth >= 7 precondition is enforced (a
    ValueError otherwise) and a certification failure is a ConstructionError.
    Without it the result is simply certified or None.
    """
    if not MIN_T <= t <= MAX_T:
        raise ValueError(f"t must lie in {MIN_T}..{MAX_T}")
    if check_girth:
        gi = girth(g)
        if gi is not None and gi < 7:
            raise ValueError(f"geodesic construction needs girth >= 7, graph has girth {gi}")
    P = find_geodesic_of_length(g, v, t + 1)
    if P is None:
        return None
    cand = geodesic_colourings(g, P, t)
    verdict = verify_reducer(g, cand)
    if not verdict.ok:
        if check_girth:
            raise ConstructionError(f"geodesic construction failed clause ({verdict.clause}): {verdict.reason}")
        return None
    cand.verdict = verdict
    return cand


# ---------------------------------------------------------------------------
# induced path with a chord vertex


def chord_t(g: Graph, Q: Sequence[int], v: int) -> int:
    """The t for which ``(Q, v)`` meets the chord-vertex labelling, or raise ValueError."""
    if not is_induced_path(g, Q):
        raise ValueError("Q is not an induced path")
    if v in Q:
        raise ValueError("v lies on Q")
    if len(Q) < 4:
        raise ValueError("Q is too short")
    x = Q[1]
    if not g.has_edge(v, x):
        raise ValueError("v is not adjacent to the second vertex of Q")
    if g.has_edge(v, Q[2]):
        # (u, x, z, q_1..q_{t-1}) has t+2 vertices
        return len(Q) - 2
    if g.has_edge(v, Q[3]):
        # (u, x, y, z, q_1..q_{t-1}) has t+3 vertices
        return len(Q) - 3
    raise ValueError("v is adjacent to neither the third nor the fourth vertex of Q")


def chord_reducer(g: Graph, Q: Sequence[int], v: int, t: int | None = None) -> Reducer:
    """Reducer on ``R = Q + {v}`` for an induced path with a chord vertex.

    Raises ValueError when the labelling does not fit and ConstructionError if
    no colouring pair exists (which the construction rules out).
    """
    tt = chord_t(g, Q, v)
    if t is not None and t != tt:
        raise ValueError(f"Q and v fit t={tt}, not t={t}")
    if not MIN_T <= tt <= MAX_T:
        raise ValueError(f"t={tt} outside {MIN_T}..{MAX_T}")
    R = list(Q) + [v]
    # red P_t and P_1 in psi1 become P_{t-1} and P_2 in psi2 (twice P_2 when t = 3)
    change = Counter({tt: -1, 1: -1})
    change.update({tt - 1: 1})
    change.update({2: 1})
    prefer = path_delta(red=change)
    out = search_colourings(g, R, tt, prefer=prefer, provenance=f"chord vertex {v} on path {list(Q)}")
    if out is None:
        raise ConstructionError(f"no chord colouring pair for Q={list(Q)}, v={v}")
    return out


def _chord_path(q, lo: int, hi: int, i: int, j: int, t: int):
    """Induced subpath of a geodesic for a shared neighbour of q[i] and q[j].

    ``q`` maps index -> vertex on [lo, hi]. Tries the forward direction
    first, then the reversed one. Returns the path or None.
    """
    gap = j - i
    for d in (1, -1):
        x = i if d == 1 else j
        idx = [x - d] + [x + d * k for k in range(gap + t)]
        if all(lo <= a <= hi for a in idx):
            return [q[a] for a in idx]
    return None


def outside_neighbours(g: Graph, Q: Sequence[int], first: int, last: int) -> dict[int, int]:
    """r_i: the neighbour of Q[i] off the geodesic, for first <= i <= last."""
    on = set(Q)
    r = {}
    for i in range(first, last + 1):
        off = [w for w in g.adj[Q[i]] if w not in on]
        if len(off) != 1:
            raise ValueError(f"vertex {Q[i]} has {len(off)} neighbours off the path; is Q a geodesic?")
        r[i] = off[0]
    return r


def _collision(r: Mapping[int, int]):
    seen: dict[int, int] = {}
    for i in sorted(r):
        if r[i] in seen:
            j0 = seen[r[i]]
            if i - j0 > 2:
                raise ConstructionError(f"shared neighbour of q_{j0} and q_{i} on a geodesic")
            return j0, i
        seen[r[i]] = i
    return None


def unbalanced_reducer(g: Graph, Q: Sequence[int], t: int) -> Reducer:
    """Reducer or half-reducer near a geodesic of length 14.

    Q is indexed q_1..q_15 as in the usual write-up; r_i is the off-path
    neighbour of q_i for 2 <= i <= 14. Cases, first match wins:
    a repeated r_i gives a chord reducer; a full chain r_3 r_4 ... r_11
    gives a chord reducer along the chain; otherwise the first non-edge
    r_i r_{i+1} gives a half-reducer on q_{i-1}..q_{i+t-1}, r_i, r_{i+1}.
    """
    if len(Q) != 15 or not is_geodesic(g, Q):
        raise ValueError("Q must be a geodesic with 15 vertices")
    if not MIN_T <= t <= MAX_T:
        raise ValueError(f"t must lie in {MIN_T}..{MAX_T}")
    q = {i + 1: v for i, v in enumerate(Q)}
    r = {i + 1: w for i, w in outside_neighbours(g, Q, 1, 13).items()}

    hit = _collision(r)
    if hit is not None:
        i, j = hit
        path = _chord_path(q, 1, 15, i, j, t)
        if path is None:
            raise ConstructionError(f"no room for a chord path around q_{i}, q_{j}")
        out = chord_reducer(g, path, r[i], t)
        out.provenance = f"geodesic-14 shared neighbour r_{i}=r_{j}; " + out.provenance
        return out

    if all(g.has_edge(r[i], r[i + 1]) for i in range(3, 11)):
        # the off-path neighbours form a chain; r_3 sees q_3 and r_4
        path = [q[2], q[3], q[4]] + [r[k] for k in range(4, t + 4)]
        if not is_induced_path(g, path):
            raise ConstructionError(f"chain path {path} is not induced")
        out = chord_reducer(g, path, r[3], t)
        out.provenance = "geodesic-14 chain r_3..r_11; " + out.provenance
        return out

    i = next(k for k in range(3, 11) if not g.has_edge(r[k], r[k + 1]))
    R = [q[k] for k in range(i - 1, i + t)] + [r[i], r[i + 1]]
    # blue q_i grows from P1 to P2; red P_t splits into P1 + P_{t-2}
    red = Counter({t: -1, 1: +1})
    if t - 2 >= 1:
        red[t - 2] += 1
    prefer = path_delta(red=red, blue={1: -1, 2: +1})
    out = search_colourings(
        g, R, t, half=True, prefer=prefer, provenance=f"geodesic-14 non-edge r_{i} r_{i + 1}"
    )
    if out is None:
        raise ConstructionError(f"no half-reducer colouring on {R}")
    return out


# ---------------------------------------------------------------------------
# composite for t >= 4


def _far_geodesic(g: Graph, u: int, length: int, dist_to: Mapping[int, int], gap: int):
    """Geodesic of ``length`` from ``u`` staying at least ``gap`` from the reference set."""
    dist = bfs_distances(g, [u], limit=length)
    for w in sorted(x for x, k in dist.items() if k == length):
        P = geodesic(g, u, w)
        if all(dist_to.get(x, gap) >= gap for x in P):
            return P
    return None


def two_separated_geodesics(g: Graph, v: int, length: int = 14, gap: int = 10, radius: int = 45):
    """Two geodesics of ``length`` at distance >= ``gap`` inside ``B_radius(v)``."""
    Q = find_geodesic_of_length(g, v, length)
    if Q is None:
        return None
    dist_q = bfs_distances(g, Q)
    around = bfs_distances(g, [v], limit=radius - length)
    for u in sorted(around, key=lambda x: (around[x], x)):
        if dist_q.get(u, gap) < gap:
            continue
        P = _far_geodesic(g, u, length, dist_q, gap)
        if P is not None:
            return Q, P
    return None


def composite_reducer(
    g: Graph,
    v: int,
    t: int,
    radius_budget: int = DEFAULT_RADIUS_BUDGET,
    diagnostics: list | None = None,
) -> Reducer | None:
    """Glue a half-reducer for t and an opposite half-reducer for t-1.

    The region is the smallest ball around ``v`` holding both gadgets'
    B_2; it is blue inside apart from the gadgets, its first outer sphere
    is blue and its second outer sphere is red.
    """
    diag = diagnostics if diagnostics is not None else []
    if not 4 <= t <= MAX_T:
        raise ValueError("composite construction needs 4 <= t <= 6")
    pair = two_separated_geodesics(g, v, 14, 10, radius_budget - 5)
    if pair is None:
        diag.append("composite: no two separated length-14 geodesics within budget")
        return None
    Q, P = pair
    first = unbalanced_reducer(g, Q, t)
    if first.red_shift == 0:
        first.provenance = "composite shortcut (first geodesic); " + first.provenance
        return first
    other = unbalanced_reducer(g, P, t)
    if other.red_shift == 0:
        other.provenance = "composite shortcut (second geodesic); " + other.provenance
        return other
    second = unbalanced_reducer(g, P, t - 1)
    if second.red_shift == 0:
        raise ConstructionError("second geodesic has a full reducer for t-1 but not for t")
    flipped = second.opposite()
    inner = set(first.psi1) | set(flipped.psi1)
    dist = bfs_distances(g, [v])
    rho = max(dist[x] for x in inner)
    if rho + 2 > radius_budget:
        diag.append(f"composite: region needs radius {rho + 2} > budget {radius_budget}")
        return None
    R = [x for x, k in dist.items() if k <= rho]
    psis = []
    for k in (0, 1):
        psi = {}
        for x, dx in dist.items():
            if dx <= rho + 1:
                psi[x] = BLUE
            elif dx == rho + 2:
                psi[x] = RED
        for src in (first, flipped):
            psi.update(src.psi1 if k == 0 else src.psi2)
        psis.append(psi)
    cand = Reducer(
        tuple(sorted(R)),
        t,
        psis[0],
        psis[1],
        f"composite around {v}: radius {rho}; S1 [{first.provenance}]; S2 opposite [{second.provenance}]",
    )
    verdict = verify_reducer(g, cand)
    if not verdict.ok:
        diag.append(f"composite: certification failed at clause ({verdict.clause}): {verdict.reason}")
        return None
    cand.verdict = verdict
    return cand


# ---------------------------------------------------------------------------
# t = 3


def _third_neighbour(g: Graph, x: int, known: Iterable[int]) -> int:
    rest = [w for w in g.adj[x] if w not in set(known)]
    if len(rest) != 1:
        raise ConstructionError(f"vertex {x} does not have exactly one further neighbour")
    return rest[0]


def p3_case(g: Graph, Q: Sequence[int]):
    """Which case of the length-20 geodesic analysis applies, as (name, i, variant).

    Name is 'collision', 'a', 'b' or 'c'; None if no case matches.
    """
    r = outside_neighbours(g, Q, 1, 19)
    hit = _collision(r)
    if hit is not None:
        return ("collision", hit[0], hit[1])
    e = lambda a, b: g.has_edge(r[a], r[b])
    for i in range(3, 10):
        if not (e(i, i + 1) or e(i, i + 2) or e(i + 1, i + 2)):
            return ("a", i, 0)
    for i in range(3, 11):
        if e(i, i + 1):
            if not e(i, i + 2) and not e(i, i + 3):
                return ("b", i, 0)
            if not e(i - 1, i + 1) and not e(i - 2, i + 1):
                return ("b", i, 1)
    for i in range(3, 9):
        if e(i, i + 1) and not (e(i + 1, i + 2) or e(i + 1, i + 3) or e(i - 1, i) or e(i - 2, i)):
            if e(i, i + 3):
                return ("c", i, 0)
            if e(i - 2, i + 1):
                return ("c", i, 1)
    return None


def p3_reducer_on(g: Graph, Q: Sequence[int]) -> Reducer:
    """P_3-reducer near a geodesic with 21 vertices q_0..q_20."""
    if len(Q) != 21 or not is_geodesic(g, Q):
        raise ValueError("Q must be a geodesic with 21 vertices")
    case = p3_case(g, Q)
    if case is None:
        raise ConstructionError("none of the three cases applies")
    return p3_reducer_for_case(g, Q, case)


def p3_reducer_for_case(g: Graph, Q: Sequence[int], case) -> Reducer:
    """Build the P_3-reducer of one named case, whether or not an earlier case also applies."""
    q = dict(enumerate(Q))
    r = outside_neighbours(g, Q, 1, 19)
    name, i, extra = case
    if name == "collision":
        j = extra
        path = _chord_path(q, 0, 20, i, j, 3)
        out = chord_reducer(g, path, r[i], 3)
        out.provenance = f"p3 shared neighbour r_{i}=r_{j}; " + out.provenance
        return out
    if name == "a":
        R = [q[k] for k in range(i - 1, i + 4)] + [r[i], r[i + 1], r[i + 2]]
        out = search_colourings(g, R, 3, provenance=f"p3 case (a) at i={i}")
        if out is None:
            raise ConstructionError(f"case (a) region {R} has no colouring pair")
        return out
    if name == "b":
        if extra == 0:
            u = _third_neighbour(g, r[i], [q[i], r[i + 1]])
            path, v = [u, r[i], q[i], q[i + 1], q[i + 2], q[i + 3]], r[i + 1]
        else:
            u = _third_neighbour(g, r[i + 1], [q[i + 1], r[i]])
            path, v = [u, r[i + 1], q[i + 1], q[i], q[i - 1], q[i - 2]], r[i]
        if not is_induced_path(g, path):
            raise ConstructionError(f"case (b) path {path} is not induced")
        out = chord_reducer(g, path, v, 3)
        out.provenance = f"p3 case (b) at i={i}; " + out.provenance
        return out
    if extra == 0:
        R = [q[k] for k in range(i - 1, i + 4)] + [r[k] for k in range(i, i + 4)]
    else:
        R = [q[k] for k in range(i - 2, i + 3)] + [r[k] for k in range(i - 2, i + 2)]
    out = search_colourings(g, R, 3, provenance=f"p3 case (c) at i={i}")
    if out is None:
        raise ConstructionError(f"case (c) region {R} has no colouring pair")
    return out


def find_p3_reducer(
    g: Graph, v: int, radius_budget: int = DEFAULT_RADIUS_BUDGET, diagnostics: list | None = None
) -> Reducer | None:
    diag = diagnostics if diagnostics is not None else []
    if radius_budget < 23:
        diag.append(f"p3: budget {radius_budget} < 23 cannot hold a length-20 geodesic and its B_3")
        return None
    Q = find_geodesic_of_length(g, v, 20)
    if Q is None:
        diag.append(f"p3: no vertex at distance 20 from {v}")
        return None
    return p3_reducer_on(g, Q)


# ---------------------------------------------------------------------------
# dispatcher


def find_reducer(
    g: Graph,
    v: int,
    t: int,
    radius_budget: int = DEFAULT_RADIUS_BUDGET,
    diagnostics: list | None = None,
) -> Reducer | None:
    """Certified P_t-reducer whose B_2 lies in ``B_radius_budget(v)``.

    Tries the geodesic construction first (it certifies whenever girth is
    high around v), then the t=3 routine or the length-14 geodesic routes.
    Failed branches are described in ``diagnostics``.
    """
    if not MIN_T <= t <= MAX_T:
        raise ValueError(f"t must lie in {MIN_T}..{MAX_T}")
    diag = diagnostics if diagnostics is not None else []

    def within(red: Reducer | None, label: str) -> Reducer | None:
        if red is None:
            return None
        rad = red.radius_from(g, v)
        if rad > radius_budget:
            diag.append(f"{label}: B_2(R) reaches radius {rad} > budget {radius_budget}")
            return None
        return red

    red = within(geodesic_reducer(g, v, t, check_girth=False), "geodesic")
    if red is not None:
        return red
    diag.append("geodesic: no certified geodesic reducer (short cycles nearby or eccentricity too small)")

    if t == 3:
        return within(find_p3_reducer(g, v, radius_budget, diag), "p3")

    Q = find_geodesic_of_length(g, v, 14)
    if Q is None:
        diag.append(f"unbalanced: no vertex at distance 14 from {v}")
        return None
    first = unbalanced_reducer(g, Q, t)
    if first.red_shift == 0:
        return within(first, "unbalanced")
    diag.append("unbalanced: only a half-reducer on the first geodesic")
    return within(composite_reducer(g, v, t, radius_budget, diag), "composite")
