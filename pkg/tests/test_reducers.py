from collections import Counter

import networkx as nx
import pytest

from isobisect.canon import path_form
from isobisect.census import BLUE, RED
from isobisect.fixtures import brick_torus, circular_ladder, named
from isobisect.graph import ball_of_set, find_geodesic_of_length, is_geodesic, is_induced_path, sphere
from isobisect.oracle import exhaustive_reducer_search, reducer_signature
from isobisect.reducers import (
    HalfReducer,
    ConstructionError,
    Reducer,
    _collision,
    chord_reducer,
    composite_reducer,
    find_p3_reducer,
    find_reducer,
    geodesic_colourings,
    geodesic_reducer,
    neighbourhood_independent,
    outside_neighbours,
    p3_case,
    p3_reducer_for_case,
    p3_reducer_on,
    path_delta,
    unbalanced_reducer,
    verify_reducer,
)

from .gadgets import chord_gadget, geodesic_gadget


@pytest.fixture(scope="module")
def torus():
    return brick_torus(40, 40)


def red_count(psi):
    return sum(1 for c in psi.values() if c == RED)


# --- verifier


def test_identical_colourings_fail_iv(foster):
    red = geodesic_reducer(foster, 0, 4)
    bad = Reducer(red.R, 4, red.psi1, dict(red.psi1))
    v = verify_reducer(foster, bad)
    assert not v.ok and v.clause == "iv"


def test_red_in_first_neighbourhood_fails_ii(foster):
    red = geodesic_reducer(foster, 0, 4)
    x = sphere(foster, red.R, 1)[0]
    psi1 = {**red.psi1, x: RED}
    psi2 = {**red.psi2, x: RED}
    v = verify_reducer(foster, Reducer(red.R, 4, psi1, psi2))
    assert not v.ok and v.clause == "ii"


def test_blue_in_second_neighbourhood_fails_ii(foster):
    red = geodesic_reducer(foster, 0, 4)
    x = sphere(foster, red.R, 2)[0]
    v = verify_reducer(foster, Reducer(red.R, 4, {**red.psi1, x: BLUE}, {**red.psi2, x: BLUE}))
    assert not v.ok and v.clause == "ii"


def test_unequal_red_counts_fail_i(foster):
    red = geodesic_reducer(foster, 0, 4)
    v0 = red.R[0]
    v = verify_reducer(foster, Reducer(red.R, 4, red.psi1, {**red.psi2, v0: 1 - red.psi2[v0]}))
    assert not v.ok and v.clause == "i"
    half = HalfReducer(red.R, 4, red.psi1, red.psi2)
    assert verify_reducer(foster, half).clause == "i'"


def test_wrong_domain_rejected(foster):
    red = geodesic_reducer(foster, 0, 4)
    psi1 = dict(red.psi1)
    psi1.pop(next(iter(psi1)))
    assert verify_reducer(foster, Reducer(red.R, 4, psi1, red.psi2)).clause == "domain"


def test_long_component_change_fails_iii(foster):
    # t=3 verdict on the t=4 gadget: a red P4 changes, which is not short enough
    red = geodesic_reducer(foster, 0, 4)
    v = verify_reducer(foster, Reducer(red.R, 3, red.psi1, red.psi2))
    assert not v.ok and v.clause == "iii"


# --- geodesic construction


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_foster_geodesic_reducer(foster, t):
    red = geodesic_reducer(foster, 0, t)
    assert red is not None and red.verdict.ok
    assert len(red.R) == t + 2
    assert red.verdict.red_delta[path_form(t)] == -1


@pytest.mark.parametrize("t", [3, 4, 5, 6])
@pytest.mark.parametrize("v", [0, 17, 45])
def test_geodesic_blue_part_is_one_edge(foster, t, v):
    red = geodesic_reducer(foster, v, t)
    region = ball_of_set(foster, red.R, 2)
    n1 = sphere(foster, red.R, 1)
    G = nx.Graph(foster.edges).subgraph(region)
    for psi in (red.psi1, red.psi2):
        blue = G.subgraph([x for x in region if psi[x] == BLUE])
        sizes = sorted(len(c) for c in nx.connected_components(blue))
        assert sizes == [1] * (len(n1) - 1) + [2]
        assert blue.number_of_edges() == 1


def test_mcgee_too_shallow_for_t6():
    g = named("mcgee")
    assert geodesic_reducer(g, 0, 6) is None


def test_geodesic_needs_girth_seven(petersen):
    with pytest.raises(ValueError):
        geodesic_reducer(petersen, 0, 3)


@pytest.mark.parametrize("name", ["foster", "tutte_coxeter", "mcgee"])
def test_neighbourhood_independent_on_high_girth(name):
    g = named(name)
    for v in (0, 5):
        for length in (2, 3, 4):
            P = find_geodesic_of_length(g, v, length)
            assert neighbourhood_independent(g, P)


def test_neighbourhood_in_k4_spans_edges(k4):
    assert not neighbourhood_independent(k4, [0, 1])


def test_heawood_single_edge_matches_scan():
    g = named("heawood")
    G = nx.Graph(g.edges)
    for u, w in g.edges:
        nb = (set(G[u]) | set(G[w])) - {u, w}
        spans = any(G.has_edge(a, b) for a in nb for b in nb)
        assert neighbourhood_independent(g, [u, w]) == (not spans)


# --- chord vertex


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_chord_gadget_certified(t):
    g, Q, v = chord_gadget(t)
    red = chord_reducer(g, Q, v, t)
    assert red.verdict.ok
    red_change = Counter({t: -1, 1: -1})
    red_change.update({t - 1: 1})
    red_change.update({2: 1})
    want_red, want_blue = path_delta(red=red_change)
    assert red.verdict.red_delta == want_red
    assert red.verdict.blue_delta == want_blue


def test_chord_requires_induced_path():
    g, Q, v = chord_gadget(3)
    with pytest.raises(ValueError, match="induced"):
        chord_reducer(g, [Q[0], Q[2], Q[1], Q[3]], v)


def test_chord_vertex_must_touch_x():
    g, Q, _ = chord_gadget(3)
    with pytest.raises(ValueError):
        chord_reducer(g, Q, Q[-1] + 10)


# --- length-14 geodesics


def test_shared_pendant_routes_to_chord():
    g, Q, r = geodesic_gadget(14, shared=(4, 5))
    assert is_geodesic(g, Q)
    red = unbalanced_reducer(g, Q, 4)
    assert red.kind == "reducer" and "shared neighbour" in red.provenance
    assert red.verdict.ok


def test_collision_far_apart_is_a_construction_error():
    with pytest.raises(ConstructionError):
        _collision({3: 10, 4: 11, 7: 10})
    assert _collision({3: 10, 5: 10}) == (3, 5)


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_cl80_chain_route(t):
    g = circular_ladder(80)
    Q = find_geodesic_of_length(g, 0, 14)
    red = unbalanced_reducer(g, Q, t)
    assert red.verdict.ok and red.kind == "reducer"
    assert "chain" in red.provenance


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_torus_half_reducer(torus, t):
    Q = find_geodesic_of_length(torus, 0, 14)
    red = unbalanced_reducer(torus, Q, t)
    assert isinstance(red, HalfReducer) and red.verdict.ok
    assert red_count(red.psi1) == red_count(red.psi2) + 1
    # the extra red vertex shows up as a red P1 in psi1 and a blue P2 in psi2
    assert red.verdict.blue_delta.get(path_form(2), 0) >= 1


def test_pendants_distinct_on_geodesics(torus):
    Q = find_geodesic_of_length(torus, 0, 14)
    r = outside_neighbours(torus, Q, 1, 13)
    assert len(set(r.values())) == len(r)


def test_unbalanced_rejects_non_geodesic(cl40):
    detour = [0, 40, 41] + list(range(1, 13))
    assert len(detour) == 15 and not is_geodesic(cl40, detour)
    with pytest.raises(ValueError):
        unbalanced_reducer(cl40, detour, 4)
    with pytest.raises(ValueError):
        unbalanced_reducer(cl40, list(range(10)), 4)


# --- composite


@pytest.mark.parametrize("t", [4, 5, 6])
def test_torus_composite(torus, t):
    diag = []
    red = composite_reducer(torus, 0, t, diagnostics=diag)
    assert red is not None, diag
    assert red.verdict.ok and red.kind == "reducer"
    assert red_count(red.psi1) == red_count(red.psi2)
    assert red.verdict.red_delta[path_form(t)] == -1
    assert red.verdict.blue_delta.get(path_form(t), 0) == 0
    assert red.radius_from(torus, 0) <= 50


def test_composite_budget_too_small(torus):
    diag = []
    assert composite_reducer(torus, 0, 4, radius_budget=16, diagnostics=diag) is None
    assert diag


# --- t = 3


def test_case_a_gadget():
    g, Q, r = geodesic_gadget(20)
    assert p3_case(g, Q)[0] == "a"
    red = p3_reducer_on(g, Q)
    assert red.verdict.ok and "case (a)" in red.provenance


@pytest.mark.parametrize("variant,extra", [(0, [(5, 6), (5, 8)]), (1, [(5, 6), (3, 6)])])
def test_case_c_gadget(variant, extra):
    g, Q, r = geodesic_gadget(20, extra_edges=extra)
    assert is_geodesic(g, Q)
    red = p3_reducer_for_case(g, Q, ("c", 5, variant))
    assert red.verdict.ok and "case (c)" in red.provenance
    assert red.verdict.red_delta[path_form(3)] == -1


def test_case_b_gadget():
    g, Q, r = geodesic_gadget(20, extra_edges=[(5, 6)])
    assert not g.has_edge(r[5], r[7]) and not g.has_edge(r[5], r[8])
    red = p3_reducer_for_case(g, Q, ("b", 5, 0))
    assert red.verdict.ok and "case (b)" in red.provenance
    u = next(w for w in g.adj[r[5]] if w not in (5, r[6]))
    path = [u, r[5], 5, 6, 7, 8]
    assert is_induced_path(g, path)
    assert set(red.R) == set(path) | {r[6]}


def test_collision_on_length_twenty():
    g, Q, r = geodesic_gadget(20, shared=(7, 8))
    assert p3_case(g, Q) == ("collision", 7, 8)
    assert p3_reducer_on(g, Q).verdict.ok


def test_three_chord_obstruction_breaks_geodesic():
    g, Q, r = geodesic_gadget(20, extra_edges=[(3, 5), (5, 7), (7, 9)])
    assert not is_geodesic(g, Q)


def test_cl120_p3():
    g = circular_ladder(120)
    red = find_p3_reducer(g, 0)
    assert red.verdict.ok and red.t == 3


def test_p3_budget_too_small(cl40):
    diag = []
    assert find_p3_reducer(cl40, 0, radius_budget=10, diagnostics=diag) is None
    assert "budget" in diag[0]


# --- dispatcher


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_dispatch_foster(foster, t):
    red = find_reducer(foster, 3, t)
    assert red.verdict.ok and red.provenance.startswith("geodesic")


@pytest.mark.parametrize("t", [3, 4, 5, 6])
def test_dispatch_cl200(t):
    red = find_reducer(circular_ladder(200), 0, t)
    assert red is not None and red.verdict.ok


def test_dispatch_k4_reports_why(k4):
    diag = []
    assert find_reducer(k4, 0, 4, diagnostics=diag) is None
    assert any("distance 14" in d for d in diag)


def test_dispatch_rejects_t(k4):
    with pytest.raises(ValueError):
        find_reducer(k4, 0, 7)


def test_json_round_trip(torus):
    for red in (find_reducer(circular_ladder(80), 0, 4), unbalanced_reducer(torus, find_geodesic_of_length(torus, 0, 14), 5)):
        back = Reducer.from_json(red.to_json())
        assert type(back) is type(red)
        assert back.psi1 == red.psi1 and back.psi2 == red.psi2
        assert verify_reducer(torus if isinstance(red, HalfReducer) else circular_ladder(80), back).ok


def test_opposite_swaps_colours(foster):
    red = geodesic_reducer(foster, 0, 3)
    opp = red.opposite()
    assert all(opp.psi1[v] == 1 - c for v, c in red.psi1.items())


# --- agreement with exhaustive search


@pytest.mark.parametrize("t", [3, 4])
def test_oracle_finds_geodesic_certificate(foster, t):
    red = find_reducer(foster, 0, t)
    found = exhaustive_reducer_search(foster, red.R, t, min_size=len(red.R))
    assert reducer_signature(red) in {reducer_signature(c) for c in found}


def test_oracle_region_with_neighbours(foster):
    red = find_reducer(foster, 0, 3)
    extra = sphere(foster, red.R, 1)[:3]
    found = exhaustive_reducer_search(foster, list(red.R) + extra, 3, min_size=len(red.R))
    assert reducer_signature(red) in {reducer_signature(c) for c in found}
    assert all(c.verdict.ok for c in found)


@pytest.mark.parametrize("t", [3, 4, 5])
def test_oracle_agrees_on_ladder(t):
    g = circular_ladder(80)
    red = find_reducer(g, 0, t)
    found = exhaustive_reducer_search(g, red.R, t, min_size=len(red.R))
    assert found
    assert reducer_signature(red) in {reducer_signature(c) for c in found}


def test_oracle_half_reducers(torus):
    red = unbalanced_reducer(torus, find_geodesic_of_length(torus, 0, 14), 3)
    found = exhaustive_reducer_search(torus, red.R, 3, half=True, min_size=len(red.R))
    assert reducer_signature(red) in {reducer_signature(c) for c in found}


def test_geodesic_colourings_boundary(foster):
    P = find_geodesic_of_length(foster, 0, 5)
    red = geodesic_colourings(foster, P, 4)
    for x in sphere(foster, P, 1):
        assert red.psi1[x] == BLUE and red.psi2[x] == BLUE
    for x in sphere(foster, P, 2):
        assert red.psi1[x] == RED and red.psi2[x] == RED
