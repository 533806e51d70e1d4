"""Tests for graph representation, G(n,p) sampling, and ball extraction."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import UnionFind, floyd_warshall, splitmix64_sequential
from shotgun import (
    GnpParams,
    Graph,
    RootedBall,
    ball_frontier,
    components,
    derive_seed,
    extract_ball,
    format_edge_list,
    parse_edge_list,
    sample_gnp,
    splitmix64,
)
from shotgun.graph import _stream_uniform

# -------------------------------------------------------------------------
# Strategies
# -------------------------------------------------------------------------


@st.composite
def graphs(draw, max_n: int = 24) -> Graph:
    n = draw(st.integers(min_value=1, max_value=max_n))
    if n < 2:
        return Graph(n, [])
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return Graph(n, chosen)


# -------------------------------------------------------------------------
# RNG
# -------------------------------------------------------------------------


def test_stream_matches_sequential_reference():
    for seed in (0, 1, 0xDEADBEEF, (1 << 64) - 1):
        ref = splitmix64_sequential(seed, 32)
        assert [splitmix64(seed, i) for i in range(32)] == ref


def test_vectorized_stream_matches_scalar():
    block = _stream_uniform(42, 7, 100)
    for i, u in enumerate(block):
        z = splitmix64(42, 7 + i)
        assert u == (z >> 11) * 2.0**-53
    assert np.all(block >= 0.0) and np.all(block < 1.0)


def test_derive_seed_spreads_parts():
    seeds = {derive_seed(9, a, b) for a in range(6) for b in range(6)}
    assert len(seeds) == 36
    assert derive_seed(9, 1, 2) != derive_seed(9, 2, 1)


# -------------------------------------------------------------------------
# Graph basics
# -------------------------------------------------------------------------


def test_graph_rejects_self_loops_and_range():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])


def test_graph_deduplicates_and_sorts():
    g = Graph(4, [(2, 0), (0, 2), (3, 1)])
    assert g.m == 2
    assert g.adj == ((2,), (3,), (0,), (1,))
    assert g.has_edge(0, 2) and g.has_edge(2, 0)
    assert not g.has_edge(0, 1)
    assert list(g.edges()) == [(0, 2), (1, 3)]


def test_graph_is_immutable():
    g = Graph(2, [(0, 1)])
    with pytest.raises(AttributeError):
        g.n = 5


@given(graphs())
def test_degree_sum_is_twice_edge_count(g: Graph):
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m


# -------------------------------------------------------------------------
# sample_gnp
# -------------------------------------------------------------------------


def test_sample_gnp_p_zero_is_empty():
    g = sample_gnp(GnpParams(n=5, p=0.0, seed=7))
    assert g.n == 5 and g.m == 0


def test_sample_gnp_p_one_is_complete():
    g = sample_gnp(GnpParams(n=4, p=1.0, seed=7))
    assert g.n == 4 and g.m == 6
    assert list(g.edges()) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_sample_gnp_is_pure():
    a = sample_gnp(GnpParams(n=64, p=0.3, seed=123))
    b = sample_gnp(GnpParams(n=64, p=0.3, seed=123))
    assert a == b
    c = sample_gnp(GnpParams(n=64, p=0.3, seed=124))
    assert a != c


def test_sample_gnp_sparse_and_dense_agree_on_distribution():
    # Not the same stream layout, but both must hit the binomial mean.
    n, trials = 200, 120
    pairs = n * (n - 1) // 2
    for p in (0.05, 0.12):
        counts = [
            sample_gnp(GnpParams(n=n, p=p, seed=derive_seed(5, t))).m
            for t in range(trials)
        ]
        mean = sum(counts) / trials
        sigma = math.sqrt(pairs * p * (1 - p) / trials)
        assert abs(mean - pairs * p) < 3 * sigma


def test_sample_gnp_mean_edges_large_scale():
    # 500 seeds at n=10^4, p=10^-3: sample mean within 3 sigma of the
    # binomial moment N*p where N = C(n,2).
    n, p, trials = 10_000, 1e-3, 500
    pairs = n * (n - 1) // 2
    total = 0
    for t in range(trials):
        total += sample_gnp(GnpParams(n=n, p=p, seed=derive_seed(11, t))).m
    mean = total / trials
    sigma_mean = math.sqrt(pairs * p * (1 - p) / trials)
    assert abs(mean - pairs * p) < 3 * sigma_mean


def test_sample_gnp_params_validated():
    with pytest.raises(ValueError):
        GnpParams(n=5, p=1.5, seed=0)
    with pytest.raises(ValueError):
        GnpParams(n=-1, p=0.5, seed=0)


# -------------------------------------------------------------------------
# extract_ball / ball_frontier
# -------------------------------------------------------------------------


def test_extract_ball_path_centre():
    g = Graph(3, [(0, 1), (1, 2)])
    ball = extract_ball(g, 1, 1)
    assert ball.k == 3 and ball.root_id == 1 and ball.root == 0
    assert ball.vertices is not None and set(ball.vertices) == {0, 1, 2}
    assert len(ball.edges) == 2


def test_extract_ball_radius_zero():
    g = Graph(3, [(0, 1), (1, 2)])
    ball = extract_ball(g, 2, 0)
    assert ball.k == 1 and ball.edges == () and ball.vertices == (2,)


def test_extract_ball_rejects_bad_vertex():
    g = Graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        extract_ball(g, 2, 1)
    with pytest.raises(ValueError):
        extract_ball(g, 0, -1)


def test_ball_frontier_path_end():
    g = Graph(3, [(0, 1), (1, 2)])
    ball = extract_ball(g, 0, 2)
    # local ids follow BFS discovery order from the root
    assert ball_frontier(ball, 0) == {0}
    assert ball_frontier(ball, 2) == {ball.vertices.index(2)}


def test_ball_frontier_radius_checked():
    ball = extract_ball(Graph(3, [(0, 1), (1, 2)]), 0, 1)
    with pytest.raises(ValueError):
        ball_frontier(ball, 2)


def test_rooted_ball_validates_connectivity():
    with pytest.raises(ValueError):
        RootedBall(radius=1, k=3, edges=((0, 1),), root_id=0)
    with pytest.raises(ValueError):
        # path of length 2 cannot sit inside a radius-1 ball
        RootedBall(radius=1, k=3, edges=((0, 1), (1, 2)), root_id=0)


def test_extract_ball_matches_distance_oracle():
    for seed in (1, 2, 3):
        g = sample_gnp(GnpParams(n=64, p=0.1, seed=seed))
        dist = floyd_warshall(g.n, list(g.edges()))
        for r in (1, 2, 3):
            for v in range(g.n):
                ball = extract_ball(g, v, r)
                assert ball.vertices is not None
                expected = {w for w in range(g.n) if dist[v, w] <= r}
                assert set(ball.vertices) == expected
                for rr in range(r + 1):
                    level = {w for w in range(g.n) if dist[v, w] == rr}
                    got = {ball.vertices[i] for i in ball_frontier(ball, rr)}
                    assert got == level


def test_extract_ball_edges_are_induced():
    g = sample_gnp(GnpParams(n=40, p=0.15, seed=9))
    ball = extract_ball(g, 0, 2)
    assert ball.vertices is not None
    inside = set(ball.vertices)
    expected = {
        (u, v) for u, v in g.edges() if u in inside and v in inside
    }
    got = {
        tuple(sorted((ball.vertices[a], ball.vertices[b])))
        for a, b in ball.edges
    }
    assert got == expected


@given(graphs(), st.integers(min_value=0, max_value=23), st.integers(0, 4))
@settings(max_examples=150)
def test_ball_nesting_property(g: Graph, v: int, r: int):
    if v >= g.n:
        v %= g.n
    inner = extract_ball(g, v, r)
    outer = extract_ball(g, v, r + 1)
    assert set(inner.vertices) <= set(outer.vertices)


@given(graphs(max_n=16), st.integers(min_value=0, max_value=15))
@settings(max_examples=100)
def test_ball_at_large_radius_is_component(g: Graph, v: int):
    if v >= g.n:
        v %= g.n
    ball = extract_ball(g, v, g.n)
    comp = next(c for c in components(g) if v in c)
    assert sorted(ball.vertices) == comp


# -------------------------------------------------------------------------
# components
# -------------------------------------------------------------------------


def test_components_two_disjoint_edges():
    g = Graph(4, [(0, 1), (2, 3)])
    assert components(g) == [[0, 1], [2, 3]]


def test_components_empty_graph():
    assert components(Graph(3, [])) == [[0], [1], [2]]


def test_components_match_union_find_oracle():
    g = sample_gnp(GnpParams(n=1000, p=1 / 1000, seed=5))
    uf = UnionFind(g.n)
    for u, v in g.edges():
        uf.union(u, v)
    assert components(g) == uf.groups()


# -------------------------------------------------------------------------
# Edge-list format
# -------------------------------------------------------------------------


def test_edge_list_round_trip_is_bit_exact():
    g = sample_gnp(GnpParams(n=30, p=0.2, seed=77))
    text = format_edge_list(g)
    assert parse_edge_list(text) == g
    assert format_edge_list(parse_edge_list(text)) == text


def test_edge_list_known_rendering():
    g = Graph(4, [(1, 3), (0, 2)])
    assert format_edge_list(g) == "4 2\n0 2\n1 3\n"


def test_edge_list_rejects_malformed_input():
    with pytest.raises(ValueError):
        parse_edge_list("")
    with pytest.raises(ValueError):
        parse_edge_list("3\n")
    with pytest.raises(ValueError):
        parse_edge_list("3 1\n1 0\n")  # not u < v
    with pytest.raises(ValueError):
        parse_edge_list("3 2\n0 1\n")  # missing edge line
    with pytest.raises(ValueError):
        parse_edge_list("3 2\n0 2\n0 1\n")  # not sorted
    with pytest.raises(ValueError):
        parse_edge_list("3 1\n0 1\nstray\n")


@given(graphs())
def test_edge_list_round_trip_property(g: Graph):
    assert parse_edge_list(format_edge_list(g)) == g
