import os
import subprocess
import sys

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isobisect import _purepy, kernels
from isobisect.balance import _path_arrays
from isobisect.coloring import make_bisection, random_proper_coloring
from isobisect.decompose import _incidence, heuristic_decompose
from isobisect.harness import random_cubic

from .conftest import random_cubic_graph

try:
    from isobisect import _speedups
except ImportError:  # extension not built
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.dtype == b.dtype and np.array_equal(a, b)
    return a == b


def random_colour(n, seed):
    return np.random.default_rng(seed).integers(0, 2, n).astype(np.int8)


def bisection_inputs(g, seed):
    pair = heuristic_decompose(g, seed=seed)
    bis, _ = make_bisection(g, random_proper_coloring(g, pair, seed), pair)
    return np.asarray(bis, dtype=np.int8), _path_arrays(pair, g.n), pair.max_len(1) + 1


# --- the pure-Python kernels against direct computations


@given(random_cubic_graph(max_n=60), st.integers(0, 2**32))
def test_label_components_matches_networkx(g, seed):
    col = random_colour(g.n, seed)
    comp, size, edges, maxdeg = _purepy.label_components(g.adj_array, col)
    G = nx.Graph(g.edges)
    for c in (0, 1):
        H = G.subgraph([v for v in range(g.n) if col[v] == c])
        for cc in nx.connected_components(H):
            ids = {int(comp[v]) for v in cc}
            assert len(ids) == 1
            k = ids.pop()
            assert size[k] == len(cc)
            assert edges[k] == H.subgraph(cc).number_of_edges()
            assert maxdeg[k] == max(d for _, d in H.subgraph(cc).degree())


def test_path_discrepancy_by_hand():
    # one path R R B R B B B: red runs of 2 and 1, blue runs of 1 and 3
    col = np.array([0, 0, 1, 0, 1, 1, 1], dtype=np.int8)
    ptr = np.array([0, 7], dtype=np.int64)
    verts = np.arange(7, dtype=np.int32)
    d = _purepy.path_discrepancy(col, ptr, verts, 4)
    assert d.tolist() == [0, 0, 1, -1, 0]


@given(random_cubic_graph(min_n=10, max_n=80), st.integers(0, 1000))
def test_repair_keeps_balance(g, seed):
    col, arrays, kmax = bisection_inputs(g, seed)
    out, obj, steps = _purepy.repair_paths(col, *arrays, kmax, seed, 500, 300)
    assert int((out == 0).sum()) == g.n // 2
    d = _purepy.path_discrepancy(out, arrays[0], arrays[1], kmax)
    assert obj == sum(abs(int(x)) for x in d[3:])


def test_bisection_candidates_are_balanced():
    g = random_cubic(12, 0)
    masks = _purepy.bisection_candidates(g.adj_array, True)
    for m in masks.tolist():
        assert bin(m).count("1") == 6
        assert m & 1


# --- both backends agree bit for bit


@needs_ext
@given(random_cubic_graph(max_n=120), st.integers(0, 2**32))
def test_label_components_backends_agree(g, seed):
    col = random_colour(g.n, seed)
    assert same(_purepy.label_components(g.adj_array, col), _speedups.label_components(g.adj_array, col))


@needs_ext
@given(random_cubic_graph(max_n=120), st.integers(0, 2**32), st.sampled_from([1, 3, 5]))
def test_decompose_search_backends_agree(g, seed, ell):
    eu, ev, inc = _incidence(g)
    a = _purepy.decompose_search(eu, ev, inc, ell, ell, seed, 5000)
    b = _speedups.decompose_search(eu, ev, inc, ell, ell, seed, 5000)
    assert same(a, b)


@needs_ext
@given(random_cubic_graph(min_n=10, max_n=200), st.integers(0, 1000))
def test_path_kernels_backends_agree(g, seed):
    col, arrays, kmax = bisection_inputs(g, seed)
    assert same(
        _purepy.path_discrepancy(col, arrays[0], arrays[1], kmax),
        _speedups.path_discrepancy(col, arrays[0], arrays[1], kmax),
    )
    assert same(
        _purepy.repair_paths(col, *arrays, kmax, seed, 2000, 300),
        _speedups.repair_paths(col, *arrays, kmax, seed, 2000, 300),
    )


@needs_ext
@pytest.mark.parametrize("n", [4, 6, 8, 10, 12, 14])
@pytest.mark.parametrize("fix_first", [True, False])
def test_bisection_candidates_backends_agree(n, fix_first):
    for seed in range(3):
        g = random_cubic(n, seed)
        assert same(
            _purepy.bisection_candidates(g.adj_array, fix_first),
            _speedups.bisection_candidates(g.adj_array, fix_first),
        )


# --- backend selection


def test_backend_name():
    assert kernels.BACKEND in ("python", "cython")
    if _speedups is not None and os.environ.get("ISOBISECT_PURE") != "1":
        assert kernels.BACKEND == "cython"


def test_pure_switch_forces_python():
    env = dict(os.environ, ISOBISECT_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from isobisect import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
