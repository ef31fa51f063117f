"""Pure-Python reference implementations of the hot kernels.

Each function here has a twin in ``_speedups.pyx`` with the same signature
and, given the same seed, the same output. ``kernels`` picks one at import.
"""
from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
CYCLE_PENALTY = 10


class Rng:
    """splitmix64; shared bit-for-bit with the compiled kernels."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        return ((self.next() >> 32) * k) >> 32


# ---------------------------------------------------------------------------
# monochromatic components


def label_components(adj, colour):
    """Label the components of both colour classes.

    Returns ``(comp, size, edges, maxdeg)``: ``comp[v]`` is the component id
    of v inside its own colour class; the other arrays are per component.
    """
    adj = np.asarray(adj)
    colour = np.asarray(colour)
    n = adj.shape[0]
    a = adj.tolist()
    c = colour.tolist()
    comp = [-1] * n
    sizes, edges, maxdeg = [], [], []
    k = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        cs = c[s]
        comp[s] = k
        stack = [s]
        size = 0
        deg_sum = 0
        md = 0
        while stack:
            v = stack.pop()
            size += 1
            d = 0
            for w in a[v]:
                if w >= 0 and c[w] == cs:
                    d += 1
                    if comp[w] < 0:
                        comp[w] = k
                        stack.append(w)
            deg_sum += d
            md = max(md, d)
        sizes.append(size)
        edges.append(deg_sum // 2)
        maxdeg.append(md)
        k += 1
    return (
        np.array(comp, dtype=np.int32),
        np.array(sizes, dtype=np.int32),
        np.array(edges, dtype=np.int32),
        np.array(maxdeg, dtype=np.int8),
    )


# ---------------------------------------------------------------------------
# linear-forest decomposition by local search


def decompose_search(eu, ev, inc, l1, l2, seed, max_steps):
    """Two-colour the edges so both colour classes are linear forests.

    ``inc`` is the ``(n, 3)`` table of incident edge ids. Returns
    ``(edge_colour, remaining_cost, steps)``; cost 0 means every colour-c
    path has at most ``l1``/``l2`` edges and there are no cycles.
    """
    eu = list(np.asarray(eu).tolist())
    ev = list(np.asarray(ev).tolist())
    inc = np.asarray(inc).tolist()
    n = len(inc)
    m = len(eu)
    lim = (l1, l2)
    rng = Rng(seed)
    col = [rng.below(2) for _ in range(m)]

    def other(e, v):
        return ev[e] if eu[e] == v else eu[e]

    def count(v, c):
        i = inc[v]
        return (col[i[0]] == c) + (col[i[1]] == c) + (col[i[2]] == c)

    def is_star(v):
        k = count(v, 0)
        return k == 0 or k == 3

    # every vertex must see both colours
    stack = [v for v in range(n) if is_star(v)]
    guard = 0
    while stack:
        guard += 1
        if guard > 100 * m + 100:
            return np.array(col, dtype=np.int8), -1, 0
        v = stack.pop()
        if not is_star(v):
            continue
        c = col[inc[v][0]]
        start = rng.below(3)
        pick = -1
        for j in range(3):
            e = inc[v][(start + j) % 3]
            if count(other(e, v), c) >= 2:
                pick = e
                break
        if pick < 0:
            pick = inc[v][start]
        col[pick] ^= 1
        x = other(pick, v)
        if is_star(x):
            stack.append(x)

    def walk(v, c):
        """Edges of the colour-c component through v, and whether it is a cycle."""
        first = [e for e in inc[v] if col[e] == c]
        out = []
        e = first[0]
        u = v
        while True:
            out.append(e)
            w = other(e, u)
            if w == v:
                return out, True
            nxt = -1
            for f in inc[w]:
                if f != e and col[f] == c:
                    nxt = f
                    break
            if nxt < 0:
                break
            e, u = nxt, w
        if len(first) == 2:
            e = first[1]
            u = v
            while True:
                out.append(e)
                w = other(e, u)
                nxt = -1
                for f in inc[w]:
                    if f != e and col[f] == c:
                        nxt = f
                        break
                if nxt < 0:
                    break
                e, u = nxt, w
        return out, False

    def comp_cost(es, cyc, c):
        if cyc:
            return CYCLE_PENALTY + len(es)
        over = len(es) - lim[c]
        return max(0, over)

    def local_cost(verts):
        seen = set()
        tot = 0
        for v in verts:
            for c in (0, 1):
                es, cyc = walk(v, c)
                key = (c, min(es))
                if key not in seen:
                    seen.add(key)
                    tot += comp_cost(es, cyc, c)
        return tot

    bad = []
    total = 0
    done = [False] * m
    for e in range(m):
        if done[e]:
            continue
        c = col[e]
        es, cyc = walk(eu[e], c)
        for f in es:
            done[f] = True
        k = comp_cost(es, cyc, c)
        if k:
            total += k
            bad.append((c, e))

    steps = 0
    while total > 0 and steps < max_steps and bad:
        steps += 1
        i = rng.below(len(bad))
        c, e0 = bad[i]
        if col[e0] != c:
            bad[i] = bad[-1]
            bad.pop()
            continue
        es, cyc = walk(eu[e0], c)
        if comp_cost(es, cyc, c) == 0:
            bad[i] = bad[-1]
            bad.pop()
            continue
        e = es[rng.below(len(es))]
        a, b = eu[e], ev[e]
        moves = []
        if count(a, c) == 2 and count(b, c) == 2:
            moves.append((e,))
        for v in (a, b):
            y = other(e, v)
            if count(y, c) != 2:
                continue
            for f in inc[v]:
                if col[f] != c:
                    x = other(f, v)
                    if count(x, col[f]) == 2:
                        moves.append((e, f))
        if not moves:
            continue
        start = rng.below(len(moves))
        best = None
        best_delta = 0
        for j in range(len(moves)):
            mv = moves[(start + j) % len(moves)]
            touched = []
            for f in mv:
                touched.append(eu[f])
                touched.append(ev[f])
            before = local_cost(touched)
            for f in mv:
                col[f] ^= 1
            after = local_cost(touched)
            for f in mv:
                col[f] ^= 1
            if best is None or after - before < best_delta:
                best = (mv, touched)
                best_delta = after - before
        if best_delta > 0 and rng.below(10) < 7:
            continue
        mv, touched = best
        for f in mv:
            col[f] ^= 1
        total += best_delta
        for v in touched:
            for cc in (0, 1):
                es, cyc = walk(v, cc)
                if comp_cost(es, cyc, cc):
                    bad.append((cc, es[0]))
    return np.array(col, dtype=np.int8), total, steps


# ---------------------------------------------------------------------------
# discrepancy repair by flipping F1 paths


def _runs(verts, col, out, sign):
    """Add ``sign`` times the signed run counts of one F2 path into ``out``.

    Red runs count +1 and blue runs -1 at index = run length.
    """
    prev = -1
    length = 0
    for v in verts:
        c = col[v]
        if c == prev:
            length += 1
        else:
            if length:
                out[length] += sign if prev == 0 else -sign
            prev = c
            length = 1
    if length:
        out[length] += sign if prev == 0 else -sign


def path_discrepancy(col, f2_ptr, f2_verts, kmax):
    """Signed counts ``r_k - b_k`` of monochromatic runs along the F2 paths."""
    col = np.asarray(col).tolist()
    ptr = np.asarray(f2_ptr).tolist()
    verts = np.asarray(f2_verts).tolist()
    out = [0] * (kmax + 1)
    for j in range(len(ptr) - 1):
        _runs(verts[ptr[j] : ptr[j + 1]], col, out, 1)
    return np.array(out, dtype=np.int64)


def repair_paths(col, f2_ptr, f2_verts, f2_of, f1_ptr, f1_verts, kmax, seed, max_steps, side_permille):
    """Hill-climb on whole-F1-path flips towards ``r_k = b_k`` for all k >= 3.

    Moves are single flips of F1 paths with an even number of vertices and
    pairs of odd paths with opposite majority colour, so the red/blue
    balance never changes. Sideways moves are taken with probability
    ``side_permille``/1000. Returns ``(colouring, objective, steps)``.
    """
    col = np.asarray(col).tolist()
    ptr = np.asarray(f2_ptr).tolist()
    verts = np.asarray(f2_verts).tolist()
    f2_of = np.asarray(f2_of).tolist()
    p1 = np.asarray(f1_ptr).tolist()
    v1 = np.asarray(f1_verts).tolist()
    rng = Rng(seed)
    npaths = len(p1) - 1
    evens = [p for p in range(npaths) if (p1[p + 1] - p1[p]) % 2 == 0]
    odds = [p for p in range(npaths) if (p1[p + 1] - p1[p]) % 2 == 1]

    D = [0] * (kmax + 1)
    for j in range(len(ptr) - 1):
        _runs(verts[ptr[j] : ptr[j + 1]], col, D, 1)

    def objective():
        s = 0
        for k in range(3, kmax + 1):
            s += D[k] if D[k] > 0 else -D[k]
        return s

    def flip(p):
        touched = sorted({f2_of[v] for v in v1[p1[p] : p1[p + 1]]})
        for j in touched:
            _runs(verts[ptr[j] : ptr[j + 1]], col, D, -1)
        for v in v1[p1[p] : p1[p + 1]]:
            col[v] ^= 1
        for j in touched:
            _runs(verts[ptr[j] : ptr[j + 1]], col, D, 1)

    def surplus(p):
        # +1 if the odd path currently has more red vertices, else -1
        first = col[v1[p1[p]]]
        return 1 if first == 0 else -1

    cur = objective()
    steps = 0
    while cur > 0 and steps < max_steps:
        steps += 1
        use_pair = (not evens) or (len(odds) >= 2 and rng.below(2) == 1)
        if use_pair:
            if len(odds) < 2:
                break
            p = odds[rng.below(len(odds))]
            q = odds[rng.below(len(odds))]
            if p == q or surplus(p) == surplus(q):
                continue
            flip(p)
            flip(q)
            new = objective()
            if new < cur or (new == cur and rng.below(1000) < side_permille):
                cur = new
            else:
                flip(q)
                flip(p)
        else:
            p = evens[rng.below(len(evens))]
            flip(p)
            new = objective()
            if new < cur or (new == cur and rng.below(1000) < side_permille):
                cur = new
            else:
                flip(p)
    return np.array(col, dtype=np.int8), cur, steps


# ---------------------------------------------------------------------------
# brute-force bisection candidates


def _signature(a, members, n):
    sig = []
    seen = [False] * n
    for s in range(n):
        if not members[s] or seen[s]:
            continue
        seen[s] = True
        stack = [s]
        dc = [0, 0, 0, 0]
        while stack:
            v = stack.pop()
            d = 0
            for w in a[v]:
                if w >= 0 and members[w]:
                    d += 1
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            dc[d] += 1
        sig.append(dc[0] + 64 * dc[1] + 4096 * dc[2] + 262144 * dc[3])
    sig.sort()
    return sig


def bisection_candidates(adj, fix_first):
    """Balanced red sets whose two colour classes have equal component invariants.

    Red sets are bitmasks over the n vertices enumerated in colex order; with
    ``fix_first`` vertex 0 is always red. The invariant compares the multisets
    of per-component degree counts, a necessary condition for isomorphism.
    """
    a = np.asarray(adj).tolist()
    n = len(a)
    half = n // 2
    out = []
    if n % 2:
        return np.array(out, dtype=np.int64)
    if fix_first:
        k, free = half - 1, n - 1
    else:
        k, free = half, n
    if k < 0:
        return np.array(out, dtype=np.int64)
    mask = (1 << k) - 1
    limit = 1 << free
    while mask < limit:
        red = (mask << 1) | 1 if fix_first else mask
        members_r = [(red >> v) & 1 == 1 for v in range(n)]
        members_b = [not x for x in members_r]
        if _signature(a, members_r, n) == _signature(a, members_b, n):
            out.append(red)
        if mask == 0:
            break
        # Gosper's hack: next integer with the same popcount
        lo = mask & -mask
        hi = mask + lo
        mask = (((mask ^ hi) >> 2) // lo) | hi
    return np.array(out, dtype=np.int64)
