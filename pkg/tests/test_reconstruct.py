"""Tests for reconstruction procedures on collections of rooted balls."""

from __future__ import annotations

import pytest

from shotgun.canon import (
    EdgeRootedGraph,
    ball_multiset,
    canonical_code_edge_rooted,
    canonical_code_plain,
    canonical_code_rooted,
    read_ball_file,
    write_ball_file,
)
from shotgun.graph import Graph, GnpParams, RootedBall, components, extract_ball, sample_gnp
from shotgun.reconstruct import (
    FAST,
    FULL,
    BallCollection,
    ColouredStar,
    Outcome,
    ReconstructionResult,
    assemble_small_components,
    colour_edge_fast,
    colour_edge_full,
    hybrid_high_low_reconstruct,
    overlap_reconstruct,
    star_colouring_reconstruct,
    two_ball_reconstruct,
)
from shotgun.reconstruct import _TIER_CODE, _adj_bits, _sub_ball_key

from oracles import floyd_warshall

# =========================================================================
# Helpers
# =========================================================================


def _collection_codes(bc: BallCollection) -> tuple:
    return tuple(sorted(canonical_code_rooted(b) for b in bc.balls))


def _assert_sound(bc: BallCollection, result: ReconstructionResult) -> None:
    """Any returned graph must explain the input ball collection."""
    if result.graph is None:
        return
    assert ball_multiset(result.graph, bc.radius) == _collection_codes(bc)


def _component_codes(g: Graph) -> list:
    out = []
    for comp in components(g):
        local = {v: i for i, v in enumerate(comp)}
        sub = [
            (local[a], local[b])
            for a, b in g.edges()
            if a in local and b in local
        ]
        out.append(canonical_code_plain(Graph(len(comp), sub)))
    return sorted(out)


def _oracle_full_colour(g: Graph, u: int, v: int):
    """Edge colour built from whole-graph distances, not from balls."""
    dist = floyd_warshall(g.n, list(g.edges()))
    members = sorted(
        w for w in range(g.n) if dist[u][w] <= 2 and dist[v][w] <= 2
    )
    local = {w: i for i, w in enumerate(members)}
    sub = tuple(
        (local[a], local[b])
        for a, b in g.edges()
        if a in local and b in local
    )
    marked = EdgeRootedGraph(k=len(members), edges=sub, u=local[u], v=local[v])
    return canonical_code_edge_rooted(marked).unordered


def _oracle_fast_colour(g: Graph, u: int, v: int):
    """Paired count sequences built from whole-graph distances."""
    dist = floyd_warshall(g.n, list(g.edges()))

    def seq(a: int, b: int):
        # For each w adjacent to b: edges from w into Gamma_2(a) \ Gamma_1(b).
        target = {
            w
            for w in range(g.n)
            if dist[a][w] == 2 and not g.has_edge(b, w) and w != b
        }
        return tuple(
            sorted(len(target.intersection(g.adj[w])) for w in g.adj[b])
        )

    return tuple(sorted((seq(u, v), seq(v, u))))


def _stars_from_graph(g: Graph, kind: str) -> list[ColouredStar]:
    colour = colour_edge_full if kind == FULL else colour_edge_fast
    incident: list[list] = [[] for _ in range(g.n)]
    for u, v in g.edges():
        c = colour(g, u, v)
        incident[u].append(c)
        incident[v].append(c)
    return [ColouredStar.from_colours(v, incident[v]) for v in range(g.n)]


# =========================================================================
# BallCollection
# =========================================================================


def test_collection_hides_original_vertex_ids() -> None:
    g = sample_gnp(GnpParams(n=30, p=0.2, seed=3))
    bc = BallCollection.from_graph(g, 2)
    assert bc.n == 30 and bc.radius == 2
    assert all(b.vertices is None for b in bc.balls)
    assert [b.root_id for b in bc.balls] == list(range(30))


def test_collection_validates_shape() -> None:
    g = sample_gnp(GnpParams(n=10, p=0.3, seed=0))
    balls = tuple(extract_ball(g, v, 2) for v in range(10))
    with pytest.raises(ValueError):
        BallCollection(n=9, balls=balls, radius=2)
    with pytest.raises(ValueError):
        BallCollection(n=10, balls=balls, radius=1)
    swapped = balls[1:] + balls[:1]
    with pytest.raises(ValueError):
        BallCollection(n=10, balls=swapped, radius=2)


def test_collection_round_trips_through_ball_file(tmp_path) -> None:
    g = sample_gnp(GnpParams(n=100, p=0.3, seed=0))
    bc = BallCollection.from_graph(g, 2)
    path = tmp_path / "balls.txt"
    write_ball_file([extract_ball(g, v, 2) for v in range(100)], path, mode="full")
    loaded = BallCollection.from_records(read_ball_file(path))
    assert [(b.k, b.edges) for b in loaded.balls] == [
        (b.k, b.edges) for b in bc.balls
    ]
    assert overlap_reconstruct(loaded).graph == g


def test_collection_rejects_code_only_records(tmp_path) -> None:
    g = Graph(3, [(0, 1), (1, 2)])
    path = tmp_path / "balls.txt"
    write_ball_file([extract_ball(g, v, 1) for v in range(3)], path, mode="codes")
    with pytest.raises(ValueError):
        BallCollection.from_records(read_ball_file(path))


# =========================================================================
# Small-component assembly
# =========================================================================


def test_assemble_three_edges_and_two_isolated_vertices() -> None:
    g = Graph(8, [(0, 1), (2, 3), (4, 5)])
    bc = BallCollection.from_graph(g, 1)
    result = assemble_small_components(bc)
    assert result.outcome is Outcome.ISOMORPHIC
    assert sorted(len(c) for c in components(result.graph)) == [1, 1, 2, 2, 2]
    assert result.stats["max_component"] == 2
    _assert_sound(bc, result)


def test_assemble_two_paths_and_a_singleton() -> None:
    g = Graph(8, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6)])
    bc = BallCollection.from_graph(g, 2)
    result = assemble_small_components(bc)
    assert result.outcome is Outcome.ISOMORPHIC
    assert sorted(len(c) for c in components(result.graph)) == [1, 3, 4]
    assert _component_codes(result.graph) == _component_codes(g)
    _assert_sound(bc, result)


def test_assemble_aborts_when_a_ball_is_too_large() -> None:
    path5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    result = assemble_small_components(BallCollection.from_graph(path5, 2))
    assert result.outcome is Outcome.NOT_APPLICABLE
    assert result.graph is None
    assert "2r+1" in result.note


def test_assemble_preserves_component_codes_on_sparse_graphs() -> None:
    n = 500
    p = n ** (-1.6)
    aborted = 0
    for seed in range(100):
        g = sample_gnp(GnpParams(n=n, p=p, seed=seed))
        bc = BallCollection.from_graph(g, 1)
        result = assemble_small_components(bc)
        if result.outcome is Outcome.NOT_APPLICABLE:
            # A component with >= 3 vertices does not fit in a 1-ball.
            assert any(len(c) >= 3 for c in components(g))
            aborted += 1
            continue
        assert result.outcome is Outcome.ISOMORPHIC
        assert _component_codes(result.graph) == _component_codes(g)
        _assert_sound(bc, result)
    assert aborted < 50


def test_assemble_flags_unremovable_ball_codes() -> None:
    g = Graph(4, [(0, 1), (2, 3)])
    balls = list(BallCollection.from_graph(g, 1).balls)
    balls[3] = RootedBall(radius=1, k=1, edges=(), root_id=3)
    doctored = BallCollection(n=4, balls=tuple(balls), radius=1)
    result = assemble_small_components(doctored)
    assert result.outcome is Outcome.INCONSISTENT
    assert result.graph is None


# =========================================================================
# Overlap reconstruction
# =========================================================================


def test_overlap_requires_radius_at_least_two() -> None:
    g = Graph(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        overlap_reconstruct(BallCollection.from_graph(g, 1))


def test_overlap_recovers_exact_labelled_graph() -> None:
    for seed in range(3):
        g = sample_gnp(GnpParams(n=100, p=0.3, seed=seed))
        bc = BallCollection.from_graph(g, 2)
        result = overlap_reconstruct(bc)
        assert result.outcome is Outcome.EXACT
        assert result.graph == g
        assert result.stats["unique_rm1_balls"] == 100
        _assert_sound(bc, result)


def test_overlap_full_code_matching_agrees_with_prefilter() -> None:
    g = sample_gnp(GnpParams(n=100, p=0.3, seed=0))
    bc = BallCollection.from_graph(g, 2)
    fast = overlap_reconstruct(bc)
    slow = overlap_reconstruct(bc, force_full_match=True)
    assert slow.outcome is fast.outcome is Outcome.EXACT
    assert slow.graph == fast.graph == g


def test_overlap_rejects_duplicate_inner_balls() -> None:
    two_paths = Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    result = overlap_reconstruct(BallCollection.from_graph(two_paths, 2))
    assert result.outcome is Outcome.NOT_APPLICABLE
    assert result.graph is None
    assert result.stats["unique_rm1_balls"] == 2


def test_overlap_detects_tampered_ball() -> None:
    g = sample_gnp(GnpParams(n=12, p=0.5, seed=5))
    bc = BallCollection.from_graph(g, 2)
    assert overlap_reconstruct(bc).outcome is Outcome.EXACT
    original = bc.balls[0]
    for dropped in original.edges:
        if 0 in dropped:
            continue
        edges = tuple(e for e in original.edges if e != dropped)
        try:
            tampered = RootedBall(radius=2, k=original.k, edges=edges, root_id=0)
        except ValueError:
            continue  # removal disconnected the ball
        balls = (tampered,) + bc.balls[1:]
        result = overlap_reconstruct(BallCollection(n=12, balls=balls, radius=2))
        assert result.outcome is Outcome.INCONSISTENT
        return
    pytest.fail("no in-ball edge could be dropped")


# =========================================================================
# Edge colours
# =========================================================================


def test_full_colour_of_path_edge_is_the_marked_path() -> None:
    g = Graph(3, [(0, 1), (1, 2)])
    manual = canonical_code_edge_rooted(
        EdgeRootedGraph(k=3, edges=((0, 1), (1, 2)), u=0, v=1)
    ).unordered
    colour = colour_edge_full(g, 0, 1)
    assert colour.kind == FULL
    assert colour.payload == manual


def test_full_colour_is_constant_on_triangle() -> None:
    g = Graph(3, [(0, 1), (0, 2), (1, 2)])
    assert len({colour_edge_full(g, u, v) for u, v in g.edges()}) == 1


def test_fast_colour_counts_on_path_and_isolated_edge() -> None:
    path3 = Graph(3, [(0, 1), (1, 2)])
    # From endpoint 1 the two neighbours {0, 2} each have zero edges into
    # the empty far side, and from endpoint 0 the single neighbour {1}
    # likewise: counts (0, 0) paired with (0,).
    assert colour_edge_fast(path3, 0, 1).payload == ((0,), (0, 0))
    lone = Graph(2, [(0, 1)])
    assert colour_edge_fast(lone, 0, 1).payload == ((0,), (0,))


def test_full_colour_from_balls_matches_whole_graph() -> None:
    g = sample_gnp(GnpParams(n=40, p=0.3, seed=1))
    bc = BallCollection.from_graph(g, 2)
    for v in range(g.n):
        labelled = extract_ball(g, v, 2)
        for local in labelled.adj[0]:
            expected = _oracle_full_colour(g, v, labelled.vertices[local])
            assert colour_edge_full(bc, v, local).payload == expected


def test_fast_colour_from_balls_matches_whole_graph() -> None:
    g = sample_gnp(GnpParams(n=40, p=0.2, seed=2))
    bc = BallCollection.from_graph(g, 2)
    for v in range(g.n):
        labelled = extract_ball(g, v, 2)
        for local in labelled.adj[0]:
            expected = _oracle_fast_colour(g, v, labelled.vertices[local])
            assert colour_edge_fast(bc, v, local).payload == expected


def test_colouring_rejects_non_edges() -> None:
    g = Graph(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        colour_edge_full(g, 0, 2)
    with pytest.raises(ValueError):
        colour_edge_fast(g, 1, 1)
    bc = BallCollection.from_graph(g, 2)
    with pytest.raises(ValueError):
        colour_edge_full(bc, 0, 99)


def test_fast_colour_is_a_function_of_full_colour() -> None:
    g = sample_gnp(GnpParams(n=40, p=0.3, seed=4))
    fast_by_full: dict = {}
    for u, v in g.edges():
        full = colour_edge_full(g, u, v)
        fast = colour_edge_fast(g, u, v)
        assert fast_by_full.setdefault(full, fast) == fast


# =========================================================================
# Star colouring
# =========================================================================


def _one_colour():
    return colour_edge_full(Graph(2, [(0, 1)]), 0, 1)


def test_star_counts_force_a_star() -> None:
    c = _one_colour()
    stars = [ColouredStar.from_colours(0, [c, c, c])]
    stars += [ColouredStar.from_colours(v, [c]) for v in (1, 2, 3)]
    result = star_colouring_reconstruct(stars)
    assert result.outcome is Outcome.EXACT
    assert list(result.graph.edges()) == [(0, 1), (0, 2), (0, 3)]


def test_triangle_counts_force_a_triangle() -> None:
    c = _one_colour()
    stars = [ColouredStar.from_colours(v, [c, c]) for v in range(3)]
    result = star_colouring_reconstruct(stars)
    assert result.outcome is Outcome.EXACT
    assert list(result.graph.edges()) == [(0, 1), (0, 2), (1, 2)]


def test_disjoint_edges_in_one_colour_are_rejected() -> None:
    c = _one_colour()
    stars = [ColouredStar.from_colours(v, [c]) for v in range(4)]
    result = star_colouring_reconstruct(stars)
    assert result.outcome is Outcome.NOT_APPLICABLE
    assert result.graph is None


def test_star_centres_must_cover_the_vertex_range() -> None:
    c = _one_colour()
    stars = [ColouredStar.from_colours(v, [c]) for v in (0, 2)]
    with pytest.raises(ValueError):
        star_colouring_reconstruct(stars)


def test_star_colouring_rebuilds_a_random_graph() -> None:
    g = sample_gnp(GnpParams(n=40, p=0.3, seed=1))
    result = star_colouring_reconstruct(_stars_from_graph(g, FULL))
    assert result.outcome is Outcome.EXACT
    assert result.graph == g


# =========================================================================
# Two-ball reconstruction
# =========================================================================


def test_two_ball_requires_radius_two_and_a_known_mode() -> None:
    g = Graph(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        two_ball_reconstruct(BallCollection.from_graph(g, 1), FAST)
    with pytest.raises(ValueError):
        two_ball_reconstruct(BallCollection.from_graph(g, 2), "QUICK")


def test_two_ball_rejects_the_five_cycle() -> None:
    cycle = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    for mode in (FULL, FAST):
        result = two_ball_reconstruct(BallCollection.from_graph(cycle, 2), mode)
        assert result.outcome is Outcome.NOT_APPLICABLE


def test_two_ball_rebuilds_single_edge_with_isolated_vertices() -> None:
    g = Graph(4, [(0, 1)])
    bc = BallCollection.from_graph(g, 2)
    for mode in (FULL, FAST):
        result = two_ball_reconstruct(bc, mode)
        assert result.outcome is Outcome.EXACT
        assert result.graph == g
        _assert_sound(bc, result)


def test_two_ball_fast_recovers_sparse_random_graphs() -> None:
    for seed in range(2):
        g = sample_gnp(GnpParams(n=300, p=0.08, seed=seed))
        bc = BallCollection.from_graph(g, 2)
        result = two_ball_reconstruct(bc, FAST)
        assert result.outcome is Outcome.EXACT
        assert result.graph == g
        _assert_sound(bc, result)


def test_two_ball_full_recovers_a_random_graph() -> None:
    g = sample_gnp(GnpParams(n=100, p=0.15, seed=0))
    bc = BallCollection.from_graph(g, 2)
    result = two_ball_reconstruct(bc, FULL)
    assert result.outcome is Outcome.EXACT
    assert result.graph == g


# =========================================================================
# Hybrid high/low reconstruction
# =========================================================================


def test_hybrid_requires_radius_at_least_four() -> None:
    g = Graph(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        hybrid_high_low_reconstruct(BallCollection.from_graph(g, 3), p_hint=0.5)


def test_hybrid_with_no_low_vertices_matches_overlap() -> None:
    for seed in range(5):
        g = sample_gnp(GnpParams(n=60, p=0.3, seed=seed))
        if min(len(g.adj[v]) for v in range(g.n)) < 9:
            continue
        bc = BallCollection.from_graph(g, 4)
        result = hybrid_high_low_reconstruct(bc, p_hint=0.3)
        assert result.outcome is Outcome.EXACT
        assert result.graph == g
        assert result.stats == {"high_count": 60, "low_count": 0}
        return
    pytest.fail("no seed produced an all-high graph")


def _core_with_pendants(
    core_n: int, seed: int, pendant_edges: list[tuple[int, int]]
) -> Graph:
    core = sample_gnp(GnpParams(n=core_n, p=0.6, seed=seed))
    n = max(max(e) for e in pendant_edges) + 1
    return Graph(n, list(core.edges()) + pendant_edges)


def test_hybrid_rejects_deep_low_degree_components() -> None:
    # Two adjacent degree-2 vertices hang off a dense asymmetric core:
    # at r=4 a low-degree component may have at most 1 vertex.
    g = _core_with_pendants(12, 0, [(12, 13), (0, 12), (1, 13)])
    result = hybrid_high_low_reconstruct(
        BallCollection.from_graph(g, 4), p_hint=4 / 7
    )
    assert result.outcome is Outcome.NOT_APPLICABLE
    assert result.graph is None
    assert "r-3" in result.note


def test_hybrid_recovers_pendant_pairs_at_radius_five() -> None:
    g = _core_with_pendants(
        14, 0, [(14, 15), (0, 14), (1, 15), (16, 17), (2, 16), (3, 17)]
    )
    bc = BallCollection.from_graph(g, 5)
    result = hybrid_high_low_reconstruct(bc, p_hint=4 / 9)
    assert result.outcome is Outcome.ISOMORPHIC
    assert result.stats == {"high_count": 14, "low_count": 4}
    _assert_sound(bc, result)


def test_hybrid_flags_non_divisible_component_counts() -> None:
    g = _core_with_pendants(
        14, 0, [(14, 15), (0, 14), (1, 15), (16, 17), (2, 16), (3, 17)]
    )
    bc = BallCollection.from_graph(g, 5)
    copied = bc.balls[14]
    balls = list(bc.balls)
    balls[17] = RootedBall(
        radius=5, k=copied.k, edges=copied.edges, root_id=17
    )
    doctored = BallCollection(n=18, balls=tuple(balls), radius=5)
    result = hybrid_high_low_reconstruct(doctored, p_hint=4 / 9)
    assert result.outcome is Outcome.INCONSISTENT


def test_hybrid_recovers_supercritical_random_graph() -> None:
    import math

    n, r = 400, 5
    p = 12.0 * math.log(n) / (r * n)
    g = sample_gnp(GnpParams(n=n, p=p, seed=0))
    bc = BallCollection.from_graph(g, r)
    result = hybrid_high_low_reconstruct(bc, p_hint=p)
    assert result.outcome in (Outcome.EXACT, Outcome.ISOMORPHIC)
    _assert_sound(bc, result)
    assert canonical_code_plain(result.graph) == canonical_code_plain(g)


# =========================================================================
# Sub-ball extraction
# =========================================================================


def test_sub_balls_inside_a_ball_match_the_true_balls() -> None:
    for n, p, r, seed in [(60, 0.15, 2, 7), (60, 0.1, 3, 8)]:
        g = sample_gnp(GnpParams(n=n, p=p, seed=seed))
        for v in range(0, n, 7):
            ball = extract_ball(g, v, r)
            bits = _adj_bits(ball)
            for local in ball.adj[0]:
                kind, code = _sub_ball_key(bits, local, r - 1, _TIER_CODE)
                assert kind == "code"
                true_ball = extract_ball(g, ball.vertices[local], r - 1)
                assert code == canonical_code_rooted(true_ball)


def test_sub_ball_key_tiers_refine_downward() -> None:
    """Equal keys at a finer tier imply equal keys at every coarser tier."""
    for n, p, r, seed in [(40, 0.1, 2, 3), (40, 0.25, 2, 4)]:
        g = sample_gnp(GnpParams(n=n, p=p, seed=seed))
        by_tier: list[dict[int, tuple]] = [{}, {}, {}]
        for v in range(n):
            ball = extract_ball(g, v, r)
            bits = _adj_bits(ball)
            for tier in range(3):
                by_tier[tier][v] = _sub_ball_key(bits, ball.root, r - 1, tier)
        for fine, coarse in ((2, 1), (2, 0), (1, 0)):
            for a in range(n):
                for b in range(a + 1, n):
                    if by_tier[fine][a] == by_tier[fine][b]:
                        assert by_tier[coarse][a] == by_tier[coarse][b]
