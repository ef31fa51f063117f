import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isobisect.census import BLUE, RED, VertexColoring, colour_censuses
from isobisect.coloring import (
    BallTooLargeError,
    BisectionError,
    centre_bound,
    classify_balls,
    coloring_from_choices,
    is_proper_on,
    make_bisection,
    mcdiarmid_bound,
    pair_opposite_balls,
    path_discrepancies,
    random_proper_coloring,
    select_separated_centres,
    sqrt_n_log_n,
)
from isobisect.decompose import LinearForestPair, circular_ladder_pair, heuristic_decompose
from isobisect.fixtures import circular_ladder
from isobisect.graph import bfs_distances
from isobisect.harness import random_cubic

from .conftest import random_cubic_graph


def mono_components(g, col):
    G = nx.Graph(g.edges)
    G.add_nodes_from(range(g.n))
    for c in (RED, BLUE):
        H = G.subgraph([v for v in range(g.n) if col[v] == c])
        for cc in nx.connected_components(H):
            yield H.subgraph(cc)


# --- random proper colouring


def test_single_path_has_two_colourings():
    pair = LinearForestPair(4, ((0, 1), (1, 2), (2, 3)), ())
    seen = {random_proper_coloring(None, pair, s).to_json() for s in range(40)}
    assert seen == {"RBRB", "BRBR"}


@given(random_cubic_graph(max_n=120), st.integers(0, 2**32))
def test_proper_on_f1_and_components_are_short_paths(g, seed):
    pair = heuristic_decompose(g, 5, 5, seed=seed % 1000)
    col = random_proper_coloring(g, pair, seed)
    assert all(col[u] != col[w] for u, w in pair.f1)
    f2 = {tuple(sorted(e)) for e in pair.f2}
    for H in mono_components(g, col):
        assert all(tuple(sorted(e)) in f2 for e in H.edges)
        assert H.number_of_nodes() <= 6
        assert H.number_of_edges() == H.number_of_nodes() - 1
        assert max((d for _, d in H.degree()), default=0) <= 2


@given(random_cubic_graph(max_n=60), st.integers(0, 2**32))
def test_reversed_choices_give_reversed_colouring(g, seed):
    pair = heuristic_decompose(g, seed=0)
    k = len(pair.paths_of(0))
    choices = np.random.default_rng(seed).integers(0, 2, k)
    a = coloring_from_choices(pair, choices)
    b = coloring_from_choices(pair, 1 - choices)
    assert b == a.opposite()


def test_choice_count_checked(k4):
    pair = heuristic_decompose(k4, seed=0)
    with pytest.raises(ValueError):
        coloring_from_choices(pair, [0] * 7)


# --- discrepancies


def test_k4_discrepancies(k4):
    assert set(path_discrepancies(k4, VertexColoring.from_red_set(4, [0, 1])).values()) == {0}
    all_red = VertexColoring(bytes(4))
    red, blue = colour_censuses(k4, all_red)
    assert all(red.path_count(t) == 0 and blue.path_count(t) == 0 for t in range(1, 7))
    assert set(path_discrepancies(k4, all_red).values()) == {0}


def test_discrepancy_reverses_sign(foster):
    pair = heuristic_decompose(foster, seed=1)
    col = random_proper_coloring(foster, pair, 5)
    d = path_discrepancies(foster, col)
    assert path_discrepancies(foster, col.opposite()) == {t: -x for t, x in d.items()}


def test_discrepancy_scale_at_ten_thousand():
    n = 10_000
    g = random_cubic(n, 7)
    pair = heuristic_decompose(g, seed=7)
    d = path_discrepancies(g, random_proper_coloring(g, pair, 7))
    for t in range(2, 7):
        assert abs(d[t]) <= 2 * sqrt_n_log_n(n)


# --- bisection


def test_balanced_input_returned_unchanged(k4):
    col = VertexColoring.from_red_set(4, [0, 2])
    pair = heuristic_decompose(k4, seed=0)
    out, flipped = make_bisection(k4, col, pair)
    assert out is col and flipped == []


def test_two_odd_paths_flip_exactly_one():
    # F1 = paths 0-1-2 and 3-4-5, both coloured RBR: imbalance 2
    pair = LinearForestPair(6, ((0, 1), (1, 2), (3, 4), (4, 5)), ())
    col = coloring_from_choices(pair, [RED, RED])
    assert col.imbalance == 2
    out, flipped = make_bisection(None, col, pair)
    assert out.imbalance == 0 and len(flipped) == 1


def test_flip_changes_imbalance_by_two():
    pair = LinearForestPair(3, ((0, 1), (1, 2)), ())
    col = coloring_from_choices(pair, [BLUE])
    flipped = coloring_from_choices(pair, [RED])
    assert flipped.imbalance - col.imbalance == 2


def test_not_enough_paths_is_explicit():
    pair = LinearForestPair(4, ((0, 1), (2, 3)), ())
    col = VertexColoring(bytes(4))  # improper, imbalance 4, nothing odd to flip
    with pytest.raises(BisectionError):
        make_bisection(None, col, pair)


@given(random_cubic_graph(max_n=200), st.integers(0, 2**32), st.none() | st.integers(0, 100))
def test_bisection_postconditions(g, seed, order_seed):
    pair = heuristic_decompose(g, seed=seed % 997)
    col = random_proper_coloring(g, pair, seed)
    out, flipped = make_bisection(g, col, pair, seed=order_seed)
    assert out.imbalance == 0
    assert is_proper_on(pair, out)
    changed = sum(a != b for a, b in zip(col, out))
    assert changed <= (pair.l1 + 1) * abs(col.imbalance) // 2
    assert len(flipped) == abs(col.imbalance) // 2


# --- centres


def test_centres_radius_zero_is_everything(petersen):
    assert select_separated_centres(petersen, 0) == list(range(10))


def test_petersen_radius_one_single_centre(petersen):
    assert select_separated_centres(petersen, 1) == [0]
    assert centre_bound(10, 1) == pytest.approx(10 / 24)


def test_cl40_radius_two(cl40):
    cs = select_separated_centres(cl40, 2)
    assert len(cs) >= math.ceil(centre_bound(80, 2))
    for c in cs:
        dist = bfs_distances(cl40, [c])
        assert all(dist[o] >= 5 for o in cs if o != c)


@given(random_cubic_graph(max_n=300), st.integers(0, 4))
def test_centres_separated_and_plentiful(g, d):
    cs = select_separated_centres(g, d)
    assert len(cs) >= centre_bound(g.n, d)
    G = nx.Graph(g.edges)
    for i, c in enumerate(cs):
        dist = nx.single_source_shortest_path_length(G, c, cutoff=2 * d)
        assert not any(o in dist for o in cs[i + 1 :])


def test_negative_radius_rejected(k4):
    with pytest.raises(ValueError):
        select_separated_centres(k4, -1)


# --- ball classes and pairing


def test_identical_balls_share_key(cl40):
    # a circular ladder is vertex transitive along its length
    col = VertexColoring.from_seq([(v // 2) % 2 if v < 40 else ((v - 40) // 2 + 1) % 2 for v in range(80)])
    census = classify_balls(cl40, col, [0, 8, 16], 1)
    assert census.kappa == 1 and census.histogram() == [3]


def test_reversed_twin_gets_opposite_key(cl40):
    col = VertexColoring.from_seq([v % 2 if v < 40 else (v + 1) % 2 for v in range(80)])
    # shifting by one step along the ladder reverses every colour
    census = classify_balls(cl40, col, [0, 11], 1)
    a, b = census.balls
    assert a.opposite_key == b.key and b.opposite_key == a.key


def test_monochromatic_balls_are_opposite(cl40):
    col = VertexColoring.from_seq([RED if (v % 40) < 20 else BLUE for v in range(80)])
    census = classify_balls(cl40, col, [5, 25], 1)
    a, b = census.balls
    assert a.key != b.key and a.opposite_key == b.key


def test_ball_too_large_is_an_error(foster):
    col = VertexColoring(bytes(foster.n))
    with pytest.raises(BallTooLargeError):
        classify_balls(foster, col, [0], 8)


def _ladder_with_blocks(red_blocks, blue_blocks):
    """CL_m with isolated mono-coloured stretches, spaced far apart."""
    m = 12 * (red_blocks + blue_blocks)
    g = circular_ladder(m)
    colours = []
    for v in range(2 * m):
        i = v % m
        colours.append(RED if (i // 12) < red_blocks else BLUE)
    return g, VertexColoring.from_seq(colours), [12 * k + 6 for k in range(red_blocks + blue_blocks)]


@pytest.mark.parametrize("red,blue,pairs", [(3, 3, 3), (5, 3, 3)])
def test_pairing_counts(red, blue, pairs):
    g, col, centres = _ladder_with_blocks(red, blue)
    census = classify_balls(g, col, centres, 1)
    assert sorted(census.counts.values()) == sorted([red, blue])
    pairing = pair_opposite_balls(census, col)
    assert pairing.s == pairs
    assert len(pairing.unmatched) == red + blue - 2 * pairs
    assert pairing.verify(g, col) is None


@given(random_cubic_graph(min_n=40, max_n=400), st.integers(0, 2**32), st.integers(0, 2))
def test_pairing_invariants(g, seed, d):
    pair = heuristic_decompose(g, seed=seed % 1000)
    col = random_proper_coloring(g, pair, seed)
    centres = select_separated_centres(g, d)
    census = classify_balls(g, col, centres, d)
    assert sum(census.counts.values()) == len(centres)
    pairing = pair_opposite_balls(census, col)
    assert pairing.verify(g, col) is None
    assert 2 * pairing.s + len(pairing.unmatched) == len(centres)


def test_pairing_verify_catches_bad_map(cl40):
    g, col, centres = _ladder_with_blocks(1, 1)
    pairing = pair_opposite_balls(classify_balls(g, col, centres, 1), col)
    p = pairing.pairs[0]
    p.mapping[p.u], p.mapping[next(iter(k for k in p.mapping if k != p.u))] = (
        p.mapping[next(iter(k for k in p.mapping if k != p.u))],
        p.mapping[p.u],
    )
    assert pairing.verify(g, col) is not None


# --- tail bound


def test_mcdiarmid_at_sqrt_n_log_n():
    for n in (100, 10_000, 10**6):
        assert mcdiarmid_bound(12, n, sqrt_n_log_n(n)) == pytest.approx(2 * n ** (-1 / 72))


def test_mcdiarmid_vacuous_at_zero():
    assert mcdiarmid_bound(3, 50, 0) == 2.0


@given(st.floats(0.1, 50), st.integers(1, 10**6), st.floats(0, 1e4), st.floats(0.01, 100))
def test_mcdiarmid_monotone(c, n, m, step):
    assert mcdiarmid_bound(c, n, m + step) <= mcdiarmid_bound(c, n, m)
    assert mcdiarmid_bound(c + step, n, m) >= mcdiarmid_bound(c, n, m)


def test_mcdiarmid_rejects_bad_input():
    with pytest.raises(ValueError):
        mcdiarmid_bound(0, 10, 1)
    with pytest.raises(ValueError):
        mcdiarmid_bound(1, 10, -1)


def test_tail_frequency_below_bound():
    # 40 colourings of one graph; P3 discrepancy is a 12-Lipschitz function of the path choices
    n = 2000
    g = random_cubic(n, 11)
    pair = heuristic_decompose(g, seed=11)
    devs = np.array([path_discrepancies(g, random_proper_coloring(g, pair, s))[3] for s in range(40)])
    for m in (0.5, 1.0, 1.5):
        dev = m * sqrt_n_log_n(n)
        freq = float(np.mean(np.abs(devs) >= dev))
        assert freq <= mcdiarmid_bound(12, n, dev)


def test_circular_ladder_pair_colouring_has_short_components():
    g = circular_ladder(30)
    pair = circular_ladder_pair(30)
    col = random_proper_coloring(g, pair, 0)
    assert max(H.number_of_nodes() for H in mono_components(g, col)) <= 4
