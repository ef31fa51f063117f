"""Stage one: random proper colouring of F1, bisection repair, and ball pairing."""
from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .canon import canonical_labeling
from .census import BLUE, RED, VertexColoring, colour_censuses
from .decompose import LinearForestPair
from .graph import (
    SMALL_GRAPH_LIMIT,
    Graph,
    GraphError,
    ball,
    bfs_distances,
    is_isomorphism,
)

MAX_PATH_ORDER = 6


class BisectionError(RuntimeError):
    pass


class BallTooLargeError(GraphError):
    pass


def coloring_from_choices(pair: LinearForestPair, choices: Sequence[int]) -> VertexColoring:
    """Colour F1 path ``p`` alternately, starting with colour ``choices[p]``."""
    paths = pair.paths_of(0)
    if len(choices) != len(paths):
        raise ValueError(f"{len(choices)} choices for {len(paths)} F1 paths")
    out = bytearray(pair.n)
    for path, c in zip(paths, choices):
        for i, v in enumerate(path):
            out[v] = (int(c) + i) % 2
    return VertexColoring(bytes(out))


def random_proper_coloring(g: Graph, pair: LinearForestPair, seed: int) -> VertexColoring:
    """Each F1 path independently gets one of its two proper colourings."""
    rng = np.random.default_rng(seed)
    choices = rng.integers(0, 2, size=len(pair.paths_of(0)))
    return coloring_from_choices(pair, choices)


def is_proper_on(pair: LinearForestPair, colouring: Sequence[int], which: int = 0) -> bool:
    return all(colouring[u] != colouring[w] for u, w in pair.forest(which))


def path_discrepancies(g: Graph, colouring, max_t: int = MAX_PATH_ORDER) -> dict[int, int]:
    """``r_{P_t} - b_{P_t}`` for t = 1..max_t."""
    red, blue = colour_censuses(g, colouring)
    return {t: red.path_count(t) - blue.path_count(t) for t in range(1, max_t + 1)}


def make_bisection(
    g: Graph, colouring: VertexColoring, pair: LinearForestPair, seed: int | None = None
) -> tuple[VertexColoring, list[int]]:
    """Flip odd-order F1 paths carrying the surplus colour until balanced.

    An F1 path with an odd number of vertices has exactly one extra vertex of
    its first colour, so each flip moves the imbalance by 2 towards zero.
    Paths are taken in index order, or in a seeded random order if ``seed``
    is given. Returns the bisection and the indices of the flipped paths.
    """
    delta = colouring.imbalance
    if delta == 0:
        return colouring, []
    if delta % 2:
        raise BisectionError("odd vertex count cannot be bisected")
    paths = pair.paths_of(0)
    order = list(range(len(paths)))
    if seed is not None:
        np.random.default_rng(seed).shuffle(order)
    surplus = RED if delta > 0 else BLUE
    need = abs(delta) // 2
    out = bytearray(colouring.colours)
    flipped = []
    for p in order:
        if len(flipped) == need:
            break
        path = paths[p]
        if len(path) % 2 == 1 and out[path[0]] == surplus:
            for v in path:
                out[v] ^= 1
            flipped.append(p)
    if len(flipped) < need:
        raise BisectionError(f"only {len(flipped)} flippable F1 paths for imbalance {delta}")
    return VertexColoring(bytes(out)), flipped


def select_separated_centres(g: Graph, d: int) -> list[int]:
    """Greedy by vertex id: pairwise distances at least ``2d + 1``."""
    if d < 0:
        raise ValueError("radius must be non-negative")
    blocked = bytearray(g.n)
    centres = []
    for v in range(g.n):
        if blocked[v]:
            continue
        centres.append(v)
        for w in bfs_distances(g, [v], limit=2 * d):
            blocked[w] = 1
    return centres


def centre_bound(n: int, d: int) -> float:
    """Guaranteed number of greedy centres: n / (3 * 2^(2d+1))."""
    return n / (3 * 2 ** (2 * d + 1))


# ---------------------------------------------------------------------------
# ball classes


@dataclass(frozen=True)
class BallRecord:
    centre: int
    key: bytes
    opposite_key: bytes
    order: tuple[int, ...]  # ball vertices in canonical order
    opposite_order: tuple[int, ...]  # same, for the colour-reversed ball


@dataclass
class BallClassCensus:
    """Balls around separated centres, classified by rooted coloured isomorphism type."""

    d: int
    balls: list[BallRecord]
    counts: dict[bytes, int] = field(default_factory=dict)

    @property
    def kappa(self) -> int:
        return len(self.counts)

    def histogram(self) -> list[int]:
        return sorted(self.counts.values(), reverse=True)


def _ball_labeling(g: Graph, centre: int, d: int, colouring, flip: bool):
    verts = ball(g, centre, d)
    if len(verts) > SMALL_GRAPH_LIMIT:
        raise BallTooLargeError(
            f"ball of radius {d} around {centre} has {len(verts)} vertices (limit {SMALL_GRAPH_LIMIT})"
        )
    h, labels = g.induced(verts)
    cols = []
    for v in labels:
        c = colouring[v] ^ 1 if flip else colouring[v]
        # the centre gets its own class so isomorphisms are rooted
        cols.append(c + 2 if v == centre else c)
    form, order = canonical_labeling(h, cols)
    return form, tuple(labels[i] for i in order)


def classify_balls(g: Graph, colouring, centres: Sequence[int], d: int) -> BallClassCensus:
    """Key each ball by its rooted, coloured canonical form.

    The colour-reversed form of a ball is the key of its opposite class.
    """
    records = []
    counts: dict[bytes, int] = defaultdict(int)
    for c in centres:
        key, order = _ball_labeling(g, c, d, colouring, flip=False)
        okey, oorder = _ball_labeling(g, c, d, colouring, flip=True)
        records.append(BallRecord(c, key, okey, order, oorder))
        counts[key] += 1
    return BallClassCensus(d, records, dict(counts))


@dataclass(frozen=True)
class BallPair:
    u: int
    w: int
    mapping: dict[int, int]  # B_d(u) -> B_d(w), reverses colours pointwise


@dataclass
class BallPairing:
    d: int
    pairs: list[BallPair]
    unmatched: list[int]

    @property
    def s(self) -> int:
        return len(self.pairs)

    def verify(self, g: Graph, colouring) -> str | None:
        """None if balls are disjoint and every map is a colour-reversing rooted isomorphism."""
        used: set[int] = set()
        for i, p in enumerate(self.pairs):
            bu, bw = ball(g, p.u, self.d), ball(g, p.w, self.d)
            for b in (bu, bw):
                if used.intersection(b):
                    return f"pair {i}: ball overlaps an earlier ball"
                used.update(b)
            if set(p.mapping) != set(bu) or set(p.mapping.values()) != set(bw):
                return f"pair {i}: map does not cover both balls"
            if p.mapping[p.u] != p.w:
                return f"pair {i}: map does not send centre to centre"
            if not is_isomorphism(g, g, p.mapping, bu):
                return f"pair {i}: map is not an isomorphism"
            for a, b in p.mapping.items():
                if colouring[a] == colouring[b]:
                    return f"pair {i}: vertex {a} -> {b} keeps its colour"
        return None


def pair_opposite_balls(census: BallClassCensus, colouring) -> BallPairing:
    """Match each class with its opposite class, lowest centre index first."""
    by_key: dict[bytes, list[BallRecord]] = defaultdict(list)
    for rec in census.balls:
        by_key[rec.key].append(rec)
    pairs = []
    matched: set[int] = set()
    for key in sorted(by_key):
        group = by_key[key]
        okey = group[0].opposite_key
        if okey == key:
            us, ws = group[0::2], group[1::2]
        elif okey in by_key and key < okey:
            us, ws = group, by_key[okey]
        else:
            continue
        for a, b in zip(us, ws):
            # a's colouring matches b's reversed colouring position by position
            mapping = dict(zip(a.order, b.opposite_order))
            for x, y in mapping.items():
                if colouring[x] == colouring[y]:
                    raise AssertionError("canonical orders disagree on colours")
            pairs.append(BallPair(a.centre, b.centre, mapping))
            matched.update((a.centre, b.centre))
    pairs.sort(key=lambda p: p.u)
    unmatched = [r.centre for r in census.balls if r.centre not in matched]
    return BallPairing(census.d, pairs, unmatched)


def mcdiarmid_bound(c: float, n: int, m: float) -> float:
    """Two-sided tail bound 2 exp(-2 m^2 / (c^2 n)) for c-Lipschitz functions of n coordinates."""
    if c <= 0:
        raise ValueError("Lipschitz constant must be positive")
    if m < 0:
        raise ValueError("deviation must be non-negative")
    return 2.0 * math.exp(-2.0 * m * m / (c * c * n))


def sqrt_n_log_n(n: int) -> float:
    return math.sqrt(n * math.log(n))
