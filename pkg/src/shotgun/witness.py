"""Non-reconstructibility witnesses built from ball-preserving edge swaps.

A witness is a second graph G' with the same multiset of rooted r-balls
as G together with a certificate that G and G' are not isomorphic. Each
finder implements one known construction; :func:`verify_witness` checks
both halves of the claim from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Sequence

from shotgun.canon import (
    PLAIN_CODE_CAP,
    CanonicalCode,
    EdgeCode,
    EdgeRootedGraph,
    canonical_code_edge_rooted,
    canonical_code_plain,
    canonical_code_rooted,
)
from shotgun.graph import Graph, components, extract_ball, _stream_u64

__all__ = [
    "COMPONENT_MULTISET",
    "DEGREE_CLASS_EDGE",
    "BALL2_CLASS_EDGE",
    "BALL3_CLASS_EDGE",
    "EXACT_ISO_CHECK",
    "NonIsoCertificate",
    "SwapWitness",
    "VerificationReport",
    "apply_swap",
    "evaluate_certificate",
    "verify_witness",
    "path_component_count",
    "find_path_pair_witness",
    "find_r1_witness",
    "find_r2_witness",
    "good_edge",
    "find_r3_witness",
    "write_witness_file",
    "read_witness_file",
]

# =========================================================================
# Types
# =========================================================================

COMPONENT_MULTISET = "COMPONENT_MULTISET"
DEGREE_CLASS_EDGE = "DEGREE_CLASS_EDGE"
BALL2_CLASS_EDGE = "BALL2_CLASS_EDGE"
BALL3_CLASS_EDGE = "BALL3_CLASS_EDGE"
EXACT_ISO_CHECK = "EXACT_ISO_CHECK"

_CERT_KINDS = (
    COMPONENT_MULTISET,
    DEGREE_CLASS_EDGE,
    BALL2_CLASS_EDGE,
    BALL3_CLASS_EDGE,
    EXACT_ISO_CHECK,
)


@dataclass(frozen=True)
class NonIsoCertificate:
    """An isomorphism-invariant whose value separates G from G'.

    ``payload_g`` and ``payload_g_prime`` hold the invariant evaluated on
    each graph; a witness certifies non-isomorphism exactly when they
    differ.
    """

    kind: str
    payload_g: tuple
    payload_g_prime: tuple

    def __post_init__(self) -> None:
        if self.kind not in _CERT_KINDS:
            raise ValueError(f"unknown certificate kind: {self.kind!r}")


def _normalize_edges(pairs: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out = []
    for a, b in pairs:
        if a == b:
            raise ValueError(f"self-loop in witness edges: ({a}, {b})")
        out.append((a, b) if a < b else (b, a))
    if len(set(out)) != len(out):
        raise ValueError("duplicate edge in witness edge list")
    return tuple(sorted(out))


@dataclass(frozen=True)
class SwapWitness:
    """An edge swap claimed to preserve the r-ball multiset.

    ``actors`` records the vertices driving the construction: ``(u, v,
    x, y)`` for the degree/ball-class swaps (edges uv and xy), or the
    (moved end, its old neighbour, new neighbour) triple for path pairs.
    """

    radius: int
    removed_edges: tuple[tuple[int, int], ...]
    added_edges: tuple[tuple[int, int], ...]
    actors: tuple[int, ...]
    certificate: NonIsoCertificate

    def __post_init__(self) -> None:
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")
        object.__setattr__(
            self, "removed_edges", _normalize_edges(self.removed_edges)
        )
        object.__setattr__(self, "added_edges", _normalize_edges(self.added_edges))
        if len(self.removed_edges) != len(self.added_edges):
            raise ValueError("swap must remove and add the same number of edges")
        if set(self.removed_edges) & set(self.added_edges):
            raise ValueError("an edge appears as both removed and added")
        object.__setattr__(self, "actors", tuple(self.actors))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking a witness from scratch against its graph."""

    balls_equal: bool
    certificate_differs: bool
    payload_g: tuple
    payload_g_prime: tuple
    plain_codes_differ: bool | None = None

    @property
    def valid(self) -> bool:
        return (
            self.balls_equal
            and self.certificate_differs
            and self.plain_codes_differ is not False
        )


# =========================================================================
# Swap application and verification
# =========================================================================


def _swap_graph(
    g: Graph,
    removed: tuple[tuple[int, int], ...],
    added: tuple[tuple[int, int], ...],
) -> Graph:
    edges = (g.edge_set() - set(removed)) | set(added)
    return Graph(g.n, sorted(edges))


def apply_swap(g: Graph, w: SwapWitness) -> Graph:
    """Return G' = (G minus removed_edges) plus added_edges.

    Raises ValueError when the witness does not apply cleanly: a removed
    edge is absent, an added edge is already present, or an endpoint is
    out of range.
    """
    edge_set = g.edge_set()
    for e in w.removed_edges:
        if e not in edge_set:
            raise ValueError(f"removed edge {e} is not in the graph")
    for a, b in w.added_edges:
        if not (0 <= a < g.n and 0 <= b < g.n):
            raise ValueError(f"added edge ({a}, {b}) is out of range")
        if (a, b) in edge_set:
            raise ValueError(f"added edge ({a}, {b}) is already present")
    return _swap_graph(g, w.removed_edges, w.added_edges)


def _gamma2_sizes(g: Graph) -> list[int]:
    """Number of vertices at distance exactly 2 from each vertex."""
    sizes = []
    for v in range(g.n):
        first = set(g.adj[v])
        second: set[int] = set()
        for u in first:
            second.update(g.adj[u])
        second.discard(v)
        second -= first
        sizes.append(len(second))
    return sizes


def _ball3_codes(g: Graph) -> list[CanonicalCode]:
    return [canonical_code_rooted(extract_ball(g, v, 3)) for v in range(g.n)]


def _count_class_edges(g: Graph, labels: Sequence, pair: tuple) -> int:
    """Edges whose endpoint labels form the unordered pair ``pair``."""
    a, b = pair
    count = 0
    for i, j in g.edges():
        li, lj = labels[i], labels[j]
        if (li == a and lj == b) or (li == b and lj == a):
            count += 1
    return count


def evaluate_certificate(
    g: Graph, g_prime: Graph, kind: str, actors: tuple[int, ...]
) -> tuple[tuple, tuple]:
    """Evaluate a certificate invariant on both graphs.

    Class parameters (degrees, second-neighbourhood sizes, 3-ball codes)
    are read off the original graph's actors, then the class-pair edge
    count is recomputed independently in each graph.
    """
    if kind == COMPONENT_MULTISET:
        return (
            tuple(sorted(len(c) for c in components(g))),
            tuple(sorted(len(c) for c in components(g_prime))),
        )
    if kind == EXACT_ISO_CHECK:
        return (
            (canonical_code_plain(g).hex(),),
            (canonical_code_plain(g_prime).hex(),),
        )
    if kind == DEGREE_CLASS_EDGE:
        x, y = actors[2], actors[3]
        pair = (len(g.adj[x]), len(g.adj[y]))
        deg_g = [len(g.adj[v]) for v in range(g.n)]
        deg_gp = [len(g_prime.adj[v]) for v in range(g_prime.n)]
        return (
            (_count_class_edges(g, deg_g, pair),),
            (_count_class_edges(g_prime, deg_gp, pair),),
        )
    if kind == BALL2_CLASS_EDGE:
        x, y = actors[2], actors[3]
        sizes_g = _gamma2_sizes(g)
        sizes_gp = _gamma2_sizes(g_prime)
        pair = (sizes_g[x], sizes_g[y])
        return (
            (_count_class_edges(g, sizes_g, pair),),
            (_count_class_edges(g_prime, sizes_gp, pair),),
        )
    if kind == BALL3_CLASS_EDGE:
        u, v = actors[0], actors[1]
        codes_g = _ball3_codes(g)
        codes_gp = _ball3_codes(g_prime)
        pair = (codes_g[u], codes_g[v])
        return (
            (_count_class_edges(g, codes_g, pair),),
            (_count_class_edges(g_prime, codes_gp, pair),),
        )
    raise ValueError(f"unknown certificate kind: {kind!r}")


def _within_distance(g: Graph, sources: set[int], depth: int) -> set[int]:
    seen = set(sources)
    frontier = list(sources)
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for z in g.adj[w]:
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    return seen


def _window_ball_codes(g: Graph, window: set[int], r: int) -> list[CanonicalCode]:
    return sorted(canonical_code_rooted(extract_ball(g, w, r)) for w in window)


def verify_witness(g: Graph, w: SwapWitness, *, exact: bool = False) -> VerificationReport:
    """Check a witness from scratch: ball multisets and certificate.

    The report is valid when the r-ball code multisets of G and G' are
    identical and the certificate invariant differs. A ball can differ
    between the two graphs only when it contains an endpoint of a
    swapped edge, so the multiset comparison is restricted to roots
    within distance r of those endpoints (in either graph); every other
    root owns the same labelled subgraph in both graphs and cancels
    from the comparison. With ``exact=True`` the multiset comparison
    runs over every root instead, and whole-graph canonical codes are
    compared as well when n is within the plain-code cap (they must
    differ for a valid witness).
    """
    g_prime = apply_swap(g, w)
    if exact:
        window = set(range(g.n))
    else:
        touched = {a for e in w.removed_edges + w.added_edges for a in e}
        window = _within_distance(g, touched, w.radius) | _within_distance(
            g_prime, touched, w.radius
        )
    balls_equal = _window_ball_codes(g, window, w.radius) == _window_ball_codes(
        g_prime, window, w.radius
    )
    payload_g, payload_gp = evaluate_certificate(
        g, g_prime, w.certificate.kind, w.actors
    )
    plain_differ: bool | None = None
    if exact and g.n <= PLAIN_CODE_CAP:
        plain_differ = canonical_code_plain(g) != canonical_code_plain(g_prime)
    return VerificationReport(
        balls_equal=balls_equal,
        certificate_differs=payload_g != payload_gp,
        payload_g=payload_g,
        payload_g_prime=payload_gp,
        plain_codes_differ=plain_differ,
    )


# =========================================================================
# Path-pair witness (any radius)
# =========================================================================


def _path_ends(g: Graph, comp: list[int]) -> list[int] | None:
    """The two degree-1 ends when the component is a path, else None."""
    if len(comp) < 2:
        return None
    degs = [len(g.adj[v]) for v in comp]
    if sum(degs) != 2 * (len(comp) - 1) or max(degs) > 2:
        return None
    ends = [v for v, d in zip(comp, degs) if d == 1]
    return ends if len(ends) == 2 else None


def path_component_count(g: Graph, vertices: int) -> int:
    """Number of components that are paths on exactly ``vertices`` vertices.

    A single vertex counts as a path on one vertex; two path components
    on 2r+1 vertices are the raw material for :func:`find_path_pair_witness`.
    """
    if vertices < 1:
        raise ValueError(f"vertex count must be >= 1, got {vertices}")
    count = 0
    for comp in components(g):
        if len(comp) != vertices:
            continue
        if vertices == 1 or _path_ends(g, comp) is not None:
            count += 1
    return count


def find_path_pair_witness(g: Graph, r: int) -> SwapWitness | None:
    """Swap between two path components on 2r+1 vertices.

    Moving an end vertex of one path onto an end of the other turns
    P(2r+1) + P(2r+1) into P(2r) + P(2r+2) without changing any r-ball:
    every ball in a path on at most 2r+2 vertices is a path whose shape
    depends only on the distances to the path's ends, clipped at r.
    Returns None when fewer than two such components exist.
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    target = 2 * r + 1
    paths = []
    for comp in components(g):
        if len(comp) == target:
            ends = _path_ends(g, comp)
            if ends is not None:
                paths.append(ends)
        if len(paths) == 2:
            break
    if len(paths) < 2:
        return None
    moved = min(paths[0])
    old_neighbour = g.adj[moved][0]
    new_neighbour = min(paths[1])
    removed = _normalize_edges(((moved, old_neighbour),))
    added = _normalize_edges(((moved, new_neighbour),))
    actors = (moved, old_neighbour, new_neighbour)
    g_prime = _swap_graph(g, removed, added)
    payload_g, payload_gp = evaluate_certificate(
        g, g_prime, COMPONENT_MULTISET, actors
    )
    return SwapWitness(
        radius=r,
        removed_edges=removed,
        added_edges=added,
        actors=actors,
        certificate=NonIsoCertificate(COMPONENT_MULTISET, payload_g, payload_gp),
    )


# =========================================================================
# Degree-class witness (r = 1)
# =========================================================================


def _candidate_edge_pairs(
    m: int, budget: int, seed: int
) -> Iterator[tuple[int, int]]:
    """Deterministic stream of ``budget`` sampled ordered index pairs."""
    produced = 0
    position = 0
    block = 8192
    while produced < budget:
        words = _stream_u64(seed, position, 2 * block)
        position += 2 * block
        for t in range(block):
            if produced >= budget:
                return
            produced += 1
            yield int(words[2 * t]) % m, int(words[2 * t + 1]) % m


def _integer_window(centre: float, width: float) -> tuple[int, int]:
    return math.ceil(centre - width), math.floor(centre + width)


def _mean_degree(g: Graph) -> float:
    return 2.0 * g.m / g.n if g.n else 0.0


def find_r1_witness(
    g: Graph,
    budget: int = 1_000_000,
    *,
    p: float | None = None,
    seed: int = 0,
) -> SwapWitness | None:
    """Search for the four-vertex degree-class swap preserving 1-balls.

    Candidate edge pairs (xy, uv) are sampled from a deterministic
    seeded stream and must satisfy: disjoint endpoints; all four cross
    pairs non-edges; all four degrees distinct and within (np)^(2/3) of
    np; all four neighbourhoods pairwise disjoint. The swap replaces
    {xy, uv} by {xu, yv}; the certificate counts edges between the
    degree classes of x and y, which drops by exactly one. Returns None
    on budget exhaustion. When ``p`` is omitted the mean degree stands
    in for np.
    """
    n, m = g.n, g.m
    if m < 2:
        return None
    np_value = n * p if p is not None else _mean_degree(g)
    if np_value <= 0:
        return None
    lo, hi = _integer_window(np_value, np_value ** (2.0 / 3.0))
    deg = [len(g.adj[v]) for v in range(n)]
    in_window = [lo <= d <= hi for d in deg]
    nbr = [set(row) for row in g.adj]
    edges = list(g.edges())
    for i, j in _candidate_edge_pairs(m, budget, seed):
        if i == j:
            continue
        x, y = edges[i]
        u, v = edges[j]
        if x == u or x == v or y == u or y == v:
            continue
        if not (in_window[x] and in_window[y] and in_window[u] and in_window[v]):
            continue
        if len({deg[x], deg[y], deg[u], deg[v]}) != 4:
            continue
        if u in nbr[x] or v in nbr[x] or u in nbr[y] or v in nbr[y]:
            continue
        quad = (x, y, u, v)
        if any(
            not nbr[quad[a]].isdisjoint(nbr[quad[b]])
            for a in range(4)
            for b in range(a + 1, 4)
        ):
            continue
        removed = _normalize_edges(((x, y), (u, v)))
        added = _normalize_edges(((x, u), (y, v)))
        actors = (u, v, x, y)
        payload_g, payload_gp = evaluate_certificate(
            g, _swap_graph(g, removed, added), DEGREE_CLASS_EDGE, actors
        )
        return SwapWitness(
            radius=1,
            removed_edges=removed,
            added_edges=added,
            actors=actors,
            certificate=NonIsoCertificate(DEGREE_CLASS_EDGE, payload_g, payload_gp),
        )
    return None


# =========================================================================
# Second-neighbourhood-class witness (r = 2)
# =========================================================================


def _gamma2_set(g: Graph, nbr: list[set[int]], v: int) -> set[int]:
    second: set[int] = set()
    for u in g.adj[v]:
        second |= nbr[u]
    second.discard(v)
    second -= nbr[v]
    return second


def _one_sided_2nbhd(
    g: Graph, nbr: list[set[int]], i: int, j: int
) -> set[int]:
    """(Gamma_1(i) minus j) union (Gamma_2(i) minus Gamma_1(j))."""
    out = set(g.adj[i])
    out.discard(j)
    out |= _gamma2_set(g, nbr, i) - nbr[j]
    return out


def find_r2_witness(
    g: Graph,
    budget: int = 1_000_000,
    *,
    p: float | None = None,
    seed: int = 0,
) -> SwapWitness | None:
    """Search for the seven-condition swap preserving 2-balls.

    Candidate edge pairs (xy, uv) must satisfy: disjoint endpoints with
    all four cross pairs non-edges; d(x)=d(v) and d(y)=d(u); degrees
    within (np)^(2/3) of np; the four second-neighbourhood sizes all
    distinct and within (n^2 p^2)^(2/3) of n^2 p^2; all four first
    neighbourhoods inducing no edges; and the one-sided 2-neighbourhoods
    taken within each candidate's own edge pairwise disjoint. The swap
    replaces {xy, uv} by {xu, yv}; the certificate counts edges between
    the second-neighbourhood-size classes of x and y. Returns None on
    budget exhaustion.
    """
    n, m = g.n, g.m
    if m < 2:
        return None
    np_value = n * p if p is not None else _mean_degree(g)
    if np_value <= 0:
        return None
    lo1, hi1 = _integer_window(np_value, np_value ** (2.0 / 3.0))
    sq = np_value * np_value
    lo2, hi2 = _integer_window(sq, sq ** (2.0 / 3.0))
    deg = [len(g.adj[v]) for v in range(n)]
    in_window = [lo1 <= d <= hi1 for d in deg]
    nbr = [set(row) for row in g.adj]

    def nbhd_has_no_edge(v: int) -> bool:
        row = g.adj[v]
        return not any(w in nbr[a] for a in row for w in row if w > a)

    empty_nbhd = [nbhd_has_no_edge(v) for v in range(n)]
    g2_size: dict[int, int] = {}

    def gamma2(v: int) -> int:
        if v not in g2_size:
            g2_size[v] = len(_gamma2_set(g, nbr, v))
        return g2_size[v]

    edges = list(g.edges())
    for i, j in _candidate_edge_pairs(m, budget, seed):
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if a == c or a == d or b == c or b == d:
            continue
        if not (in_window[a] and in_window[b] and in_window[c] and in_window[d]):
            continue
        if c in nbr[a] or d in nbr[a] or c in nbr[b] or d in nbr[b]:
            continue
        for x, y, u, v in ((a, b, c, d), (a, b, d, c)):
            if deg[x] != deg[v] or deg[y] != deg[u]:
                continue
            sizes = (gamma2(x), gamma2(y), gamma2(u), gamma2(v))
            if len(set(sizes)) != 4:
                break  # independent of orientation
            if not all(lo2 <= s <= hi2 for s in sizes):
                break
            if not (
                empty_nbhd[x] and empty_nbhd[y] and empty_nbhd[u] and empty_nbhd[v]
            ):
                break
            one_sided = (
                _one_sided_2nbhd(g, nbr, x, y),
                _one_sided_2nbhd(g, nbr, y, x),
                _one_sided_2nbhd(g, nbr, u, v),
                _one_sided_2nbhd(g, nbr, v, u),
            )
            if any(
                not one_sided[s].isdisjoint(one_sided[t])
                for s in range(4)
                for t in range(s + 1, 4)
            ):
                break
            removed = _normalize_edges(((x, y), (u, v)))
            added = _normalize_edges(((x, u), (y, v)))
            actors = (u, v, x, y)
            payload_g, payload_gp = evaluate_certificate(
                g, _swap_graph(g, removed, added), BALL2_CLASS_EDGE, actors
            )
            return SwapWitness(
                radius=2,
                removed_edges=removed,
                added_edges=added,
                actors=actors,
                certificate=NonIsoCertificate(
                    BALL2_CLASS_EDGE, payload_g, payload_gp
                ),
            )
    return None


# =========================================================================
# Good edges and the 3-ball-preserving swap (r = 3)
# =========================================================================


def _ball_vertices(g: Graph, start: int, depth: int) -> set[int]:
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for z in g.adj[w]:
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        if not nxt:
            break
        frontier = nxt
    return seen


def good_edge(g: Graph, u: int, v: int, p: float) -> bool:
    """Tree-neighbourhood and typical-degree predicate for an edge.

    True iff the induced subgraph on the union of the 5-balls of u and v
    is a tree (connected and acyclic) and every vertex within distance 2
    of u or v has degree strictly within 10*sqrt(np log np) of (n-1)p.
    """
    if not g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge")
    np_value = g.n * p
    if np_value <= 1.0:
        return False  # the degree window is empty or undefined
    span = _ball_vertices(g, u, 5) | _ball_vertices(g, v, 5)
    inner = 0
    for w in span:
        for z in g.adj[w]:
            if z > w and z in span:
                inner += 1
    if inner != len(span) - 1:
        return False
    # The union of two balls around adjacent roots is connected, so the
    # edge count alone settles acyclicity; keep an explicit check anyway.
    reached = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for w in frontier:
            for z in g.adj[w]:
                if z in span and z not in reached:
                    reached.add(z)
                    nxt.append(z)
        frontier = nxt
    if len(reached) != len(span):
        return False
    window = 10.0 * math.sqrt(np_value * math.log(np_value))
    centre = (g.n - 1) * p
    near = _ball_vertices(g, u, 2) | _ball_vertices(g, v, 2)
    return all(abs(len(g.adj[z]) - centre) < window for z in near)


def _edge_structure_code(g: Graph, u: int, v: int) -> EdgeCode:
    """Edge-rooted code of the union of 2-balls around an edge's ends."""
    span = sorted(_ball_vertices(g, u, 2) | _ball_vertices(g, v, 2))
    local = {w: i for i, w in enumerate(span)}
    sub = tuple(
        (local[a], local[b])
        for a in span
        for b in g.adj[a]
        if a < b and b in local
    )
    marked = EdgeRootedGraph(k=len(span), edges=sub, u=local[u], v=local[v])
    return canonical_code_edge_rooted(marked)


def _no_new_short_cycle(g_prime: Graph, added: tuple[tuple[int, int], ...]) -> bool:
    """No cycle of length <= 7 passes through any added edge."""
    kept = [e for e in g_prime.edges()]
    for a, b in added:
        trimmed = Graph(g_prime.n, [e for e in kept if e != (a, b)])
        if b in _ball_vertices(trimmed, a, 6):
            return False
    return True


def find_r3_witness(g: Graph, p: float) -> SwapWitness | None:
    """Pigeonhole two good edges with matching local structure and swap.

    Good edges are bucketed by the edge-rooted canonical code of the
    union of 2-balls around their endpoints (one representative stored
    per code). A later good edge xy matching an earlier uv is accepted
    when x and y are at distance at least 7 from both u and v; the
    stored ordered codes fix the correspondence u -> x, and the swap
    replaces {uv, xy} by {uy, vx}. The construction is abandoned for a
    candidate pair when the swap would close a cycle of length <= 7 or
    when the 3-ball codes of u and v are not unique in the graph (the
    certificate counts edges between those two 3-ball classes). Returns
    None when no bucket collision survives the checks.
    """
    codes3: list[CanonicalCode] | None = None

    def cached_codes3() -> list[CanonicalCode]:
        nonlocal codes3
        if codes3 is None:
            codes3 = _ball3_codes(g)
        return codes3

    buckets: dict[bytes, tuple[tuple[int, int], EdgeCode, int]] = {}
    for u, v in g.edges():
        if not good_edge(g, u, v, p):
            continue
        code = _edge_structure_code(g, u, v)
        key = code.unordered.data
        if key not in buckets:
            buckets[key] = ((u, v), code, 1)
            continue
        (first_u, first_v), first_code, seen = buckets[key]
        buckets[key] = ((first_u, first_v), first_code, seen + 1)
        far = _ball_vertices(g, first_u, 6) | _ball_vertices(g, first_v, 6)
        if u in far or v in far:
            continue
        if code.as_uv == first_code.as_uv:
            x, y = u, v
        elif code.as_vu == first_code.as_uv:
            x, y = v, u
        else:  # the unordered codes matched, so one ordering must too
            continue
        candidate = _try_r3_swap(g, first_u, first_v, x, y, cached_codes3)
        if candidate is not None:
            return candidate
    return None


def _try_r3_swap(
    g: Graph,
    u: int,
    v: int,
    x: int,
    y: int,
    codes3_source: Callable[[], list[CanonicalCode]],
) -> SwapWitness | None:
    removed = _normalize_edges(((u, v), (x, y)))
    added = _normalize_edges(((u, y), (v, x)))
    if any(e in g.edge_set() for e in added):
        return None
    g_prime = _swap_graph(g, removed, added)
    if not _no_new_short_cycle(g_prime, added):
        return None
    codes = codes3_source()
    if codes.count(codes[u]) != 1 or codes.count(codes[v]) != 1:
        return None
    payload_g, payload_gp = evaluate_certificate(
        g, g_prime, BALL3_CLASS_EDGE, (u, v, x, y)
    )
    return SwapWitness(
        radius=3,
        removed_edges=removed,
        added_edges=added,
        actors=(u, v, x, y),
        certificate=NonIsoCertificate(BALL3_CLASS_EDGE, payload_g, payload_gp),
    )


# =========================================================================
# Witness file I/O
# =========================================================================


def _format_payload(payload: tuple) -> str:
    tokens = []
    for x in payload:
        if isinstance(x, bool) or not isinstance(x, (int, str)):
            raise ValueError(f"payload entries must be int or str, got {x!r}")
        tokens.append(f"i:{x}" if isinstance(x, int) else f"s:{x}")
    return " ".join(tokens)


def _parse_payload(tokens: list[str]) -> tuple:
    out: list[int | str] = []
    for tok in tokens:
        tag, _, value = tok.partition(":")
        if tag == "i":
            out.append(int(value))
        elif tag == "s":
            out.append(value)
        else:
            raise ValueError(f"malformed payload token: {tok!r}")
    return tuple(out)


def write_witness_file(w: SwapWitness, path: str | Path) -> None:
    """Serialize a witness as a line-based text record."""
    lines = [f"witness {w.radius}"]
    lines.append(f"removed {len(w.removed_edges)}")
    lines.extend(f"{a} {b}" for a, b in w.removed_edges)
    lines.append(f"added {len(w.added_edges)}")
    lines.extend(f"{a} {b}" for a, b in w.added_edges)
    lines.append("actors " + " ".join(str(a) for a in w.actors))
    lines.append(f"certificate {w.certificate.kind}")
    lines.append("payload-g " + _format_payload(w.certificate.payload_g))
    lines.append("payload-gprime " + _format_payload(w.certificate.payload_g_prime))
    Path(path).write_text("\n".join(lines) + "\n")


def read_witness_file(path: str | Path) -> SwapWitness:
    """Parse a witness file written by :func:`write_witness_file`."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    cursor = 0

    def take(prefix: str) -> list[str]:
        nonlocal cursor
        if cursor >= len(lines):
            raise ValueError(f"witness file ended before {prefix!r}")
        parts = lines[cursor].split()
        if parts[0] != prefix:
            raise ValueError(f"expected {prefix!r}, got {lines[cursor]!r}")
        cursor += 1
        return parts[1:]

    radius = int(take("witness")[0])

    def take_edges(prefix: str) -> tuple[tuple[int, int], ...]:
        nonlocal cursor
        count = int(take(prefix)[0])
        out = []
        for _ in range(count):
            a, b = lines[cursor].split()
            cursor += 1
            out.append((int(a), int(b)))
        return tuple(out)

    removed = take_edges("removed")
    added = take_edges("added")
    actors = tuple(int(t) for t in take("actors"))
    kind = take("certificate")[0]
    payload_g = _parse_payload(take("payload-g"))
    payload_gp = _parse_payload(take("payload-gprime"))
    if cursor != len(lines):
        raise ValueError("trailing content in witness file")
    return SwapWitness(
        radius=radius,
        removed_edges=removed,
        added_edges=added,
        actors=actors,
        certificate=NonIsoCertificate(kind, payload_g, payload_gp),
    )
