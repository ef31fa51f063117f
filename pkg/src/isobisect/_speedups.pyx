# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled twins of the kernels in ``_purepy``.

Same signatures, same return types, and bit-identical results for equal
seeds. The random stream is the same splitmix64 generator.
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint64_t
from libcpp.algorithm cimport sort
from libcpp.vector cimport vector

cnp.import_array()

DEF CYCLE_PENALTY = 10


cdef struct Rng:
    uint64_t state


cdef inline uint64_t rng_next(Rng* r) nogil:
    r.state += 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = r.state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int64_t rng_below(Rng* r, int64_t k) nogil:
    return <int64_t>(((rng_next(r) >> 32) * <uint64_t>k) >> 32)


cdef Rng make_rng(object seed):
    cdef Rng r
    r.state = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    return r


# ---------------------------------------------------------------------------
# monochromatic components


def label_components(adj, colour):
    cdef int32_t[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int32)
    cdef int8_t[::1] c = np.ascontiguousarray(colour, dtype=np.int8)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t deg = a.shape[1]
    comp_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] comp = comp_arr
    cdef vector[int32_t] sizes, edges
    cdef vector[int8_t] maxdeg
    cdef vector[int32_t] stack
    cdef int32_t k = 0, s, v, w, size, deg_sum, md, d, j
    cdef int8_t cs
    for s in range(n):
        if comp[s] >= 0:
            continue
        cs = c[s]
        comp[s] = k
        stack.clear()
        stack.push_back(s)
        size = 0
        deg_sum = 0
        md = 0
        while stack.size():
            v = stack.back()
            stack.pop_back()
            size += 1
            d = 0
            for j in range(deg):
                w = a[v, j]
                if w >= 0 and c[w] == cs:
                    d += 1
                    if comp[w] < 0:
                        comp[w] = k
                        stack.push_back(w)
            deg_sum += d
            if d > md:
                md = d
        sizes.push_back(size)
        edges.push_back(deg_sum // 2)
        maxdeg.push_back(md)
        k += 1
    return (
        comp_arr,
        np.array(sizes, dtype=np.int32),
        np.array(edges, dtype=np.int32),
        np.array(maxdeg, dtype=np.int8),
    )


# ---------------------------------------------------------------------------
# linear-forest decomposition by local search


cdef struct Search:
    int32_t* eu
    int32_t* ev
    int32_t* inc
    int8_t* col
    int lim0
    int lim1


cdef inline int other(Search* S, int e, int v) nogil:
    return S.ev[e] if S.eu[e] == v else S.eu[e]


cdef inline int count(Search* S, int v, int c) nogil:
    cdef int32_t* i = S.inc + 3 * v
    return (S.col[i[0]] == c) + (S.col[i[1]] == c) + (S.col[i[2]] == c)


cdef inline bint is_star(Search* S, int v) nogil:
    cdef int k = count(S, v, 0)
    return k == 0 or k == 3


cdef inline int next_edge(Search* S, int w, int e, int c) nogil:
    cdef int j, f
    for j in range(3):
        f = S.inc[3 * w + j]
        if f != e and S.col[f] == c:
            return f
    return -1


cdef bint walk(Search* S, int v, int c, vector[int]& out) nogil:
    """Fill ``out`` with the colour-c component through v; True for a cycle."""
    cdef int first0 = -1, first1 = -1, j, f, e, u, w, nxt
    out.clear()
    for j in range(3):
        f = S.inc[3 * v + j]
        if S.col[f] == c:
            if first0 < 0:
                first0 = f
            elif first1 < 0:
                first1 = f
    if first0 < 0:
        return False
    e = first0
    u = v
    while True:
        out.push_back(e)
        w = other(S, e, u)
        if w == v:
            return True
        nxt = next_edge(S, w, e, c)
        if nxt < 0:
            break
        e = nxt
        u = w
    if first1 >= 0:
        e = first1
        u = v
        while True:
            out.push_back(e)
            w = other(S, e, u)
            nxt = next_edge(S, w, e, c)
            if nxt < 0:
                break
            e = nxt
            u = w
    return False


cdef inline int comp_cost(Search* S, vector[int]& es, bint cyc, int c) nogil:
    if cyc:
        return CYCLE_PENALTY + <int>es.size()
    cdef int over = <int>es.size() - (S.lim0 if c == 0 else S.lim1)
    return over if over > 0 else 0


cdef inline int vec_min(vector[int]& es) nogil:
    cdef int best = es[0]
    cdef size_t i
    for i in range(1, es.size()):
        if es[i] < best:
            best = es[i]
    return best


cdef int local_cost(Search* S, vector[int]& verts, vector[int]& buf, vector[int64_t]& seen) nogil:
    cdef int tot = 0, c
    cdef size_t i, j
    cdef int64_t key
    cdef bint cyc, found
    seen.clear()
    for i in range(verts.size()):
        for c in range(2):
            cyc = walk(S, verts[i], c, buf)
            if buf.size() == 0:
                continue
            key = 2 * <int64_t>vec_min(buf) + c
            found = False
            for j in range(seen.size()):
                if seen[j] == key:
                    found = True
                    break
            if not found:
                seen.push_back(key)
                tot += comp_cost(S, buf, cyc, c)
    return tot


def decompose_search(eu_in, ev_in, inc_in, l1, l2, seed, max_steps):
    cdef int32_t[::1] eu = np.ascontiguousarray(eu_in, dtype=np.int32)
    cdef int32_t[::1] ev = np.ascontiguousarray(ev_in, dtype=np.int32)
    cdef int32_t[:, ::1] inc = np.ascontiguousarray(inc_in, dtype=np.int32)
    cdef int n = inc.shape[0]
    cdef int m = eu.shape[0]
    cdef Rng rng = make_rng(seed)
    col_arr = np.zeros(m, dtype=np.int8)
    cdef int8_t[::1] col = col_arr
    cdef int i
    for i in range(m):
        col[i] = <int8_t>rng_below(&rng, 2)
    if m == 0:
        return col_arr, 0, 0

    cdef Search S
    S.eu = &eu[0]
    S.ev = &ev[0]
    S.inc = &inc[0, 0]
    S.col = &col[0]
    S.lim0 = l1
    S.lim1 = l2

    # every vertex must see both colours
    cdef vector[int] stack
    cdef int v, c, start, pick, e, j, x
    cdef int64_t guard = 0
    for v in range(n):
        if is_star(&S, v):
            stack.push_back(v)
    while stack.size():
        guard += 1
        if guard > 100 * m + 100:
            return col_arr, -1, 0
        v = stack.back()
        stack.pop_back()
        if not is_star(&S, v):
            continue
        c = col[inc[v, 0]]
        start = <int>rng_below(&rng, 3)
        pick = -1
        for j in range(3):
            e = inc[v, (start + j) % 3]
            if count(&S, other(&S, e, v), c) >= 2:
                pick = e
                break
        if pick < 0:
            pick = inc[v, start]
        col[pick] ^= 1
        x = other(&S, pick, v)
        if is_star(&S, x):
            stack.push_back(x)

    cdef vector[int] es, buf, touched, best_touched
    cdef vector[int64_t] seen
    cdef vector[int] bad_c, bad_e
    cdef vector[int] done
    cdef bint cyc
    cdef int64_t total = 0
    cdef int k
    done.resize(m, 0)
    for e in range(m):
        if done[e]:
            continue
        c = col[e]
        cyc = walk(&S, eu[e], c, es)
        for j in range(<int>es.size()):
            done[es[j]] = 1
        k = comp_cost(&S, es, cyc, c)
        if k:
            total += k
            bad_c.push_back(c)
            bad_e.push_back(e)

    cdef int64_t steps = 0
    cdef int64_t limit = max_steps
    cdef int e0, a, b, y, f, nmoves, before, after, delta, best_delta, best_j, q
    cdef int mv_e[16]
    cdef int mv_f[16]
    cdef bint have_best
    while total > 0 and steps < limit and bad_e.size():
        steps += 1
        i = <int>rng_below(&rng, bad_e.size())
        c = bad_c[i]
        e0 = bad_e[i]
        if col[e0] != c:
            bad_c[i] = bad_c.back()
            bad_e[i] = bad_e.back()
            bad_c.pop_back()
            bad_e.pop_back()
            continue
        cyc = walk(&S, eu[e0], c, es)
        if comp_cost(&S, es, cyc, c) == 0:
            bad_c[i] = bad_c.back()
            bad_e[i] = bad_e.back()
            bad_c.pop_back()
            bad_e.pop_back()
            continue
        e = es[rng_below(&rng, es.size())]
        a = eu[e]
        b = ev[e]
        nmoves = 0
        if count(&S, a, c) == 2 and count(&S, b, c) == 2:
            mv_e[nmoves] = e
            mv_f[nmoves] = -1
            nmoves += 1
        for q in range(2):
            v = a if q == 0 else b
            y = other(&S, e, v)
            if count(&S, y, c) != 2:
                continue
            for j in range(3):
                f = inc[v, j]
                if col[f] != c:
                    x = other(&S, f, v)
                    if count(&S, x, col[f]) == 2:
                        mv_e[nmoves] = e
                        mv_f[nmoves] = f
                        nmoves += 1
        if nmoves == 0:
            continue
        start = <int>rng_below(&rng, nmoves)
        have_best = False
        best_delta = 0
        best_j = -1
        for j in range(nmoves):
            q = (start + j) % nmoves
            touched.clear()
            touched.push_back(eu[mv_e[q]])
            touched.push_back(ev[mv_e[q]])
            if mv_f[q] >= 0:
                touched.push_back(eu[mv_f[q]])
                touched.push_back(ev[mv_f[q]])
            before = local_cost(&S, touched, buf, seen)
            col[mv_e[q]] ^= 1
            if mv_f[q] >= 0:
                col[mv_f[q]] ^= 1
            after = local_cost(&S, touched, buf, seen)
            col[mv_e[q]] ^= 1
            if mv_f[q] >= 0:
                col[mv_f[q]] ^= 1
            delta = after - before
            if not have_best or delta < best_delta:
                have_best = True
                best_j = q
                best_delta = delta
        if best_delta > 0 and rng_below(&rng, 10) < 7:
            continue
        q = best_j
        touched.clear()
        touched.push_back(eu[mv_e[q]])
        touched.push_back(ev[mv_e[q]])
        if mv_f[q] >= 0:
            touched.push_back(eu[mv_f[q]])
            touched.push_back(ev[mv_f[q]])
        col[mv_e[q]] ^= 1
        if mv_f[q] >= 0:
            col[mv_f[q]] ^= 1
        total += best_delta
        for j in range(<int>touched.size()):
            for c in range(2):
                cyc = walk(&S, touched[j], c, es)
                if es.size() and comp_cost(&S, es, cyc, c):
                    bad_c.push_back(c)
                    bad_e.push_back(es[0])
    return col_arr, total, steps


# ---------------------------------------------------------------------------
# discrepancy repair by flipping F1 paths


cdef inline void runs(int32_t* verts, Py_ssize_t lo, Py_ssize_t hi, int8_t* col, int64_t* out, int sign, Py_ssize_t kmax) except *:
    cdef int prev = -1
    cdef Py_ssize_t length = 0, i
    cdef int c
    for i in range(lo, hi):
        c = col[verts[i]]
        if c == prev:
            length += 1
        else:
            if length:
                if length > kmax:
                    raise IndexError("run longer than kmax")
                out[length] += sign if prev == 0 else -sign
            prev = c
            length = 1
    if length:
        if length > kmax:
            raise IndexError("run longer than kmax")
        out[length] += sign if prev == 0 else -sign


def path_discrepancy(col_in, f2_ptr, f2_verts, kmax):
    cdef int8_t[::1] col = np.ascontiguousarray(col_in, dtype=np.int8)
    cdef int64_t[::1] ptr = np.ascontiguousarray(f2_ptr, dtype=np.int64)
    cdef int32_t[::1] verts = np.ascontiguousarray(f2_verts, dtype=np.int32)
    out_arr = np.zeros(kmax + 1, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t j
    if verts.shape[0] == 0 or col.shape[0] == 0:
        return out_arr
    for j in range(ptr.shape[0] - 1):
        runs(&verts[0], ptr[j], ptr[j + 1], &col[0], &out[0], 1, kmax)
    return out_arr


cdef int64_t repair_objective(int64_t* D, int kmax) nogil:
    cdef int64_t s = 0
    cdef int k
    for k in range(3, kmax + 1):
        s += D[k] if D[k] > 0 else -D[k]
    return s


cdef void repair_flip(int p, int64_t* p1, int32_t* v1, int64_t* ptr, int32_t* verts, int32_t* f2_of,
                      int8_t* col, int64_t* D, int kmax, vector[int]& touched) except *:
    cdef int64_t i
    cdef size_t j
    touched.clear()
    for i in range(p1[p], p1[p + 1]):
        touched.push_back(f2_of[v1[i]])
    sort(touched.begin(), touched.end())
    # drop duplicates
    cdef size_t w = 0
    for j in range(touched.size()):
        if j == 0 or touched[j] != touched[j - 1]:
            touched[w] = touched[j]
            w += 1
    touched.resize(w)
    for j in range(touched.size()):
        runs(verts, ptr[touched[j]], ptr[touched[j] + 1], col, D, -1, kmax)
    for i in range(p1[p], p1[p + 1]):
        col[v1[i]] ^= 1
    for j in range(touched.size()):
        runs(verts, ptr[touched[j]], ptr[touched[j] + 1], col, D, 1, kmax)


def repair_paths(col_in, f2_ptr, f2_verts, f2_of_in, f1_ptr, f1_verts, kmax, seed, max_steps, side_permille):
    col_arr = np.array(col_in, dtype=np.int8, copy=True)
    cdef int8_t[::1] col = col_arr
    cdef int64_t[::1] ptr = np.ascontiguousarray(f2_ptr, dtype=np.int64)
    cdef int32_t[::1] verts = np.ascontiguousarray(f2_verts, dtype=np.int32)
    cdef int32_t[::1] f2_of = np.ascontiguousarray(f2_of_in, dtype=np.int32)
    cdef int64_t[::1] p1 = np.ascontiguousarray(f1_ptr, dtype=np.int64)
    cdef int32_t[::1] v1 = np.ascontiguousarray(f1_verts, dtype=np.int32)
    cdef int K = kmax
    cdef int side = side_permille
    cdef Rng rng = make_rng(seed)
    cdef int npaths = p1.shape[0] - 1
    cdef vector[int] evens, odds, touched
    cdef int p, q
    for p in range(npaths):
        if (p1[p + 1] - p1[p]) % 2 == 0:
            evens.push_back(p)
        else:
            odds.push_back(p)
    D_arr = np.zeros(K + 1, dtype=np.int64)
    cdef int64_t[::1] D = D_arr
    cdef Py_ssize_t j
    if col.shape[0] == 0 or verts.shape[0] == 0:
        return col_arr, repair_objective(&D[0], K), 0
    for j in range(ptr.shape[0] - 1):
        runs(&verts[0], ptr[j], ptr[j + 1], &col[0], &D[0], 1, K)

    cdef int64_t cur = repair_objective(&D[0], K), new
    cdef int64_t steps = 0, limit = max_steps
    cdef bint use_pair
    cdef int8_t* C = &col[0]
    cdef int64_t* DP = &D[0]
    while cur > 0 and steps < limit:
        steps += 1
        use_pair = evens.size() == 0 or (odds.size() >= 2 and rng_below(&rng, 2) == 1)
        if use_pair:
            if odds.size() < 2:
                break
            p = odds[rng_below(&rng, odds.size())]
            q = odds[rng_below(&rng, odds.size())]
            if p == q or (C[v1[p1[p]]] == 0) == (C[v1[p1[q]]] == 0):
                continue
            repair_flip(p, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
            repair_flip(q, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
            new = repair_objective(DP, K)
            if new < cur or (new == cur and rng_below(&rng, 1000) < side):
                cur = new
            else:
                repair_flip(q, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
                repair_flip(p, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
        else:
            p = evens[rng_below(&rng, evens.size())]
            repair_flip(p, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
            new = repair_objective(DP, K)
            if new < cur or (new == cur and rng_below(&rng, 1000) < side):
                cur = new
            else:
                repair_flip(p, &p1[0], &v1[0], &ptr[0], &verts[0], &f2_of[0], C, DP, K, touched)
    return col_arr, cur, steps


# ---------------------------------------------------------------------------
# brute-force bisection candidates


cdef void signature(int32_t[:, ::1] a, uint64_t members, int n, vector[int64_t]& sig, vector[int]& stack) except *:
    cdef uint64_t seen = 0
    cdef int s, v, w, j, d
    cdef int64_t dc0, dc1, dc2, dc3
    sig.clear()
    for s in range(n):
        if not (members >> s) & 1 or (seen >> s) & 1:
            continue
        seen |= (<uint64_t>1) << s
        stack.clear()
        stack.push_back(s)
        dc0 = dc1 = dc2 = dc3 = 0
        while stack.size():
            v = stack.back()
            stack.pop_back()
            d = 0
            for j in range(a.shape[1]):
                w = a[v, j]
                if w >= 0 and (members >> w) & 1:
                    d += 1
                    if not (seen >> w) & 1:
                        seen |= (<uint64_t>1) << w
                        stack.push_back(w)
            if d == 0:
                dc0 += 1
            elif d == 1:
                dc1 += 1
            elif d == 2:
                dc2 += 1
            else:
                dc3 += 1
        sig.push_back(dc0 + 64 * dc1 + 4096 * dc2 + 262144 * dc3)
    sort(sig.begin(), sig.end())


def bisection_candidates(adj, fix_first):
    cdef int32_t[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int32)
    cdef int n = a.shape[0]
    cdef list out = []
    if n % 2:
        return np.array(out, dtype=np.int64)
    if n > 62:
        raise ValueError("bisection_candidates supports at most 62 vertices")
    cdef int half = n // 2, k, free
    cdef uint64_t mask, limit, red, lo, hi, full
    cdef vector[int64_t] sr, sb
    cdef vector[int] stack
    cdef bint ff = bool(fix_first)
    if ff:
        k, free = half - 1, n - 1
    else:
        k, free = half, n
    if k < 0:
        return np.array(out, dtype=np.int64)
    full = ((<uint64_t>1) << n) - 1
    mask = ((<uint64_t>1) << k) - 1
    limit = (<uint64_t>1) << free
    while mask < limit:
        red = ((mask << 1) | 1) if ff else mask
        signature(a, red, n, sr, stack)
        signature(a, full & ~red, n, sb, stack)
        if sr == sb:
            out.append(<int64_t>red)
        if mask == 0:
            break
        lo = mask & (~mask + 1)
        hi = mask + lo
        mask = (((mask ^ hi) >> 2) // lo) | hi
    return np.array(out, dtype=np.int64)
