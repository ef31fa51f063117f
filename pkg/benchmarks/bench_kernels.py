"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_kernels.py --n 20000 --repeat 3

Both backends get identical inputs; outputs are compared before timing is
reported, so a mismatch aborts the run.
"""
import argparse
import json
import time

import numpy as np

from isobisect import _purepy
from isobisect.balance import _path_arrays
from isobisect.coloring import make_bisection, random_proper_coloring
from isobisect.decompose import _incidence, heuristic_decompose
from isobisect.harness import random_cubic

try:
    from isobisect import _speedups
except ImportError:
    _speedups = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def cases(n, seed):
    g = random_cubic(n, seed)
    eu, ev, inc = _incidence(g)
    pair = heuristic_decompose(g, seed=seed)
    bis, _ = make_bisection(g, random_proper_coloring(g, pair, seed), pair)
    col = np.asarray(bis, dtype=np.int8)
    arrays = _path_arrays(pair, n)
    kmax = pair.max_len(1) + 1
    small = random_cubic(16, seed)
    return {
        "label_components": lambda m: m.label_components(g.adj_array, col),
        "decompose_search": lambda m: m.decompose_search(eu, ev, inc, 5, 5, seed, 10**6),
        "path_discrepancy": lambda m: m.path_discrepancy(col, arrays[0], arrays[1], kmax),
        "repair_paths": lambda m: m.repair_paths(col, *arrays, kmax, seed, 20_000, 300),
        "bisection_candidates(n=16)": lambda m: m.bisection_candidates(small.adj_array, True),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="one JSON object per kernel")
    args = ap.parse_args(argv)
    if _speedups is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    for name, call in cases(args.n, args.seed).items():
        tp, op = best_of(lambda call=call: call(_purepy), args.repeat)
        tc, oc = best_of(lambda call=call: call(_speedups), args.repeat)
        if not same(op, oc):
            raise SystemExit(f"{name}: backends disagree")
        row = {"kernel": name, "n": args.n, "python_s": round(tp, 5), "cython_s": round(tc, 5), "speedup": round(tp / tc, 1)}
        if args.json:
            print(json.dumps(row))
        else:
            print(f"{name:28s} python {tp:9.4f}s  cython {tc:9.4f}s  x{tp / tc:6.1f}")


if __name__ == "__main__":
    main()
