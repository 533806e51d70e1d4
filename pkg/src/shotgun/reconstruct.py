"""Reconstruction procedures that consume only rooted ball collections.

Four methods, each with an explicit structural precondition checked from
the balls alone, never from the hidden graph:

- assemble_small_components: components small enough to fit in one ball;
  greedy largest-ball assembly, output isomorphic.
- overlap_reconstruct: unique (r-1)-balls; neighbours are identified by
  matching their (r-1)-ball classes inside each r-ball, output exact.
- two_ball_reconstruct: radius 2; edges are coloured by a joint
  2-neighbourhood class (full) or paired degree sequences (fast), and
  colour classes that never contain two disjoint edges are stars or
  triangles, which pin every edge; output exact.
- hybrid_high_low_reconstruct: radius >= 4; high-degree vertices get
  overlap treatment via 3-ball classes, low-degree components are read
  whole out of single balls with their attachment decorations and
  deduplicated by counting; output isomorphic (exact when no vertex is
  low-degree).

Outcomes are data, not exceptions: phase-transition measurement needs to
count NOT_APPLICABLE and INCONSISTENT alongside successes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from shotgun.canon import (
    BallRecord,
    CanonicalCode,
    EdgeRootedGraph,
    canonical_code_coloured,
    canonical_code_edge_rooted,
    canonical_code_rooted,
)
from shotgun.graph import Graph, RootedBall, extract_ball

__all__ = [
    "Outcome",
    "ReconstructionResult",
    "BallCollection",
    "EdgeColour",
    "ColouredStar",
    "FULL",
    "FAST",
    "assemble_small_components",
    "overlap_reconstruct",
    "colour_edge_full",
    "colour_edge_fast",
    "star_colouring_reconstruct",
    "two_ball_reconstruct",
    "hybrid_high_low_reconstruct",
]


class Outcome(str, Enum):
    """Shared outcome vocabulary for reconstruction and witness search."""

    EXACT = "EXACT"
    ISOMORPHIC = "ISOMORPHIC"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    INCONSISTENT = "INCONSISTENT"
    WITNESS_FOUND = "WITNESS_FOUND"
    NONE = "NONE"


@dataclass(frozen=True)
class ReconstructionResult:
    """Outcome of a reconstruction attempt.

    `graph` is set for EXACT and ISOMORPHIC outcomes only. EXACT promises
    labelled edge-set equality with the hidden source; ISOMORPHIC promises
    equality of r-ball code multisets.
    """

    outcome: Outcome
    graph: Graph | None = None
    note: str = ""
    stats: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class BallCollection:
    """All n rooted r-balls of a hidden graph, indexed by root id.

    Balls are normalized to carry no original-id maps beyond their roots,
    so reconstruction code cannot read labels the shotgun setting hides.
    """

    n: int
    radius: int
    balls: tuple[RootedBall, ...]

    def __post_init__(self) -> None:
        if len(self.balls) != self.n:
            raise ValueError("ball count disagrees with n")
        for i, ball in enumerate(self.balls):
            if ball.root_id != i:
                raise ValueError(f"ball {i} has root id {ball.root_id}")
            if ball.radius != self.radius:
                raise ValueError("balls disagree on radius")
        object.__setattr__(
            self, "balls", tuple(b.without_vertices() for b in self.balls)
        )

    @classmethod
    def from_graph(cls, g: Graph, r: int) -> BallCollection:
        return cls(
            n=g.n,
            radius=r,
            balls=tuple(extract_ball(g, v, r) for v in range(g.n)),
        )

    @classmethod
    def from_records(cls, records: Sequence[BallRecord]) -> BallCollection:
        """Assemble from full-mode ball file records."""
        balls: dict[int, RootedBall] = {}
        for rec in records:
            if rec.ball is None:
                raise ValueError("codes-only records cannot drive reconstruction")
            balls[rec.root_id] = rec.ball
        n = len(balls)
        if sorted(balls) != list(range(n)):
            raise ValueError("record root ids must be exactly 0..n-1")
        radii = {b.radius for b in balls.values()}
        if len(radii) > 1:
            raise ValueError("records disagree on radius")
        radius = radii.pop() if radii else 0
        return cls(n=n, radius=radius, balls=tuple(balls[i] for i in range(n)))


# =========================================================================
# Bitset helpers over a single ball
# =========================================================================


def _adj_bits(ball: RootedBall) -> list[int]:
    bits = [0] * ball.k
    for a, b in ball.edges:
        bits[a] |= 1 << b
        bits[b] |= 1 << a
    return bits


_BYTE_BITS = tuple(
    tuple(b for b in range(8) if byte >> b & 1) for byte in range(256)
)


def _bit_indices(mask: int) -> list[int]:
    out: list[int] = []
    base = 0
    for byte in mask.to_bytes((mask.bit_length() + 7) // 8, "little"):
        if byte:
            for b in _BYTE_BITS[byte]:
                out.append(base + b)
        base += 8
    return out


def _mask_bfs(
    bits: list[int], start: int, depth: int
) -> tuple[int, list[int], list[int]]:
    """BFS from `start` up to `depth`; returns (mask, order, distances)."""
    seen = 1 << start
    frontier = seen
    order = [start]
    dist = [0]
    for d in range(1, depth + 1):
        nxt = 0
        for w in _bit_indices(frontier):
            nxt |= bits[w]
        nxt &= ~seen
        if not nxt:
            break
        seen |= nxt
        for w in _bit_indices(nxt):
            order.append(w)
            dist.append(d)
        frontier = nxt
    return seen, order, dist


def _mask_invariant(
    bits: list[int], mask: int, order: list[int], dist: list[int]
) -> tuple:
    """Root-preserving isomorphism invariant of the sub-ball on `mask`.

    Same shape as :func:`shotgun.canon.ball_invariant`: coarser than the
    canonical code, so pairwise-distinct invariants certify pairwise
    distinct codes, never the other way around.
    """
    pair: dict[int, tuple[int, int]] = {}
    rows: list[int] = []
    m2 = 0
    for w, d in zip(order, dist):
        row = bits[w] & mask
        rows.append(row)
        c = row.bit_count()
        m2 += c
        pair[w] = (d, c)
    items: list[tuple] = []
    for w, row in zip(order, rows):
        inner: list[tuple[int, int]] = []
        while row:
            low = row & -row
            inner.append(pair[low.bit_length() - 1])
            row ^= low
        inner.sort()
        items.append(pair[w] + (tuple(inner),))
    items.sort()
    return (len(order), m2 // 2, pair[order[0]][1], tuple(items))


def _mask_rooted_ball(
    bits: list[int], mask: int, order: list[int], dist: list[int], radius: int
) -> RootedBall:
    """Materialize the sub-ball on `mask` as a ball rooted at order[0]."""
    local = {w: i for i, w in enumerate(order)}
    k = len(order)
    rows: list[list[int]] = [[] for _ in range(k)]
    for w in order:
        a = local[w]
        rows[a] = sorted(local[x] for x in _bit_indices(bits[w] & mask))
    edges = tuple((a, b) for a in range(k) for b in rows[a] if a < b)
    return RootedBall._unchecked(
        radius=radius,
        k=k,
        edges=edges,
        root_id=0,
        vertices=None,
        adj=tuple(tuple(row) for row in rows),
        dist=tuple(dist),
    )


_TIER_DEG = 0
_TIER_INV = 1
_TIER_CODE = 2


def _mask_deg_key(
    bits: list[int], mask: int, order: list[int], dist: list[int]
) -> tuple:
    """(distance, degree) multiset of the sub-ball on `mask`.

    Strictly coarser than :func:`_mask_invariant` (which appends each
    vertex's neighbour multiset) and much cheaper; both are invariant
    under root-preserving isomorphism of the sub-ball.
    """
    pairs: list[tuple[int, int]] = []
    m2 = 0
    for w, d in zip(order, dist):
        c = (bits[w] & mask).bit_count()
        m2 += c
        pairs.append((d, c))
    root_deg = pairs[0][1]
    pairs.sort()
    return (len(order), m2 // 2, root_deg, tuple(pairs))


def _sub_ball_key(bits: list[int], start: int, radius: int, tier: int) -> tuple:
    """Matching key of the radius-`radius` sub-ball around `start`.

    Tier 0 is the (distance, degree) multiset, tier 1 the structural
    invariant with per-vertex neighbour profiles, tier 2 the canonical
    code. Equal higher-tier keys imply equal lower-tier keys, so scanning
    tiers upward until keys are pairwise distinct never loses a match.
    """
    mask, order, dist = _mask_bfs(bits, start, radius)
    if tier >= _TIER_CODE:
        ball = _mask_rooted_ball(bits, mask, order, dist, radius)
        return ("code", canonical_code_rooted(ball))
    if tier == _TIER_INV:
        return ("inv", _mask_invariant(bits, mask, order, dist))
    return ("deg", _mask_deg_key(bits, mask, order, dist))


# =========================================================================
# Small-component assembly
# =========================================================================


def assemble_small_components(bc: BallCollection) -> ReconstructionResult:
    """Greedy assembly when every ball is strictly smaller than 2r+1.

    In that regime every component fits inside a single ball of one of
    its vertices, a largest remaining ball is an entire largest remaining
    component, and deleting the component's own ball codes from the
    multiset leaves the same problem on the rest.
    """
    r = bc.radius
    cap = 2 * r + 1
    for ball in bc.balls:
        if ball.k >= cap:
            return ReconstructionResult(
                outcome=Outcome.NOT_APPLICABLE,
                note=f"a ball has {ball.k} >= 2r+1 = {cap} vertices",
                stats={"max_component": _max_ball_size(bc)},
            )
    remaining = Counter(canonical_code_rooted(ball) for ball in bc.balls)
    largest_for: dict[CanonicalCode, RootedBall] = {}
    for ball in bc.balls:
        code = canonical_code_rooted(ball)
        largest_for.setdefault(code, ball)
    out_edges: list[tuple[int, int]] = []
    next_id = 0
    while remaining:
        # a largest remaining ball is an entire component; ties broken by
        # lexicographically least code for determinism
        size = max(largest_for[c].k for c in remaining)
        code = min(c for c in remaining if largest_for[c].k == size)
        comp = largest_for[code]
        comp_graph = Graph(comp.k, comp.edges)
        for a, b in comp.edges:
            out_edges.append((next_id + a, next_id + b))
        for w in range(comp.k):
            wcode = canonical_code_rooted(extract_ball(comp_graph, w, r))
            if remaining[wcode] <= 0:
                return ReconstructionResult(
                    outcome=Outcome.INCONSISTENT,
                    note="component ball codes missing from the collection",
                )
            remaining[wcode] -= 1
            if remaining[wcode] == 0:
                del remaining[wcode]
        next_id += comp.k
    if next_id != bc.n:
        return ReconstructionResult(
            outcome=Outcome.INCONSISTENT,
            note="assembled vertex count disagrees with collection size",
        )
    return ReconstructionResult(
        outcome=Outcome.ISOMORPHIC,
        graph=Graph(bc.n, out_edges),
        stats={"max_component": _max_ball_size(bc)},
    )


def _max_ball_size(bc: BallCollection) -> int:
    return max((ball.k for ball in bc.balls), default=0)


# =========================================================================
# Overlap reconstruction
# =========================================================================


def overlap_reconstruct(
    bc: BallCollection, *, force_full_match: bool = False
) -> ReconstructionResult:
    """Exact reconstruction when the (r-1)-balls are pairwise distinct.

    Each vertex's (r-1)-ball class is read off its own r-ball; inside the
    r-ball of v, the (r-1)-sub-ball around each neighbour u equals u's
    true (r-1)-ball (shortest paths of length <= r-1 from u cannot leave
    the ball), so matching classes identifies u and yields the edge {v, u}
    with original labels.

    Matching runs on the cheapest structural key that is pairwise
    distinct across roots (degree multisets, then neighbour-profile
    invariants), falling back to full canonical codes when both collide
    (`force_full_match` forces the code path).
    """
    r = bc.radius
    if r < 2:
        raise ValueError(
            "overlap reconstruction needs radius >= 2: the visible "
            "(r-1)-balls of a radius-1 collection are featureless points"
        )
    n = bc.n
    if n == 0:
        return ReconstructionResult(outcome=Outcome.EXACT, graph=Graph(0, []))
    all_bits = [_adj_bits(ball) for ball in bc.balls]

    tier = _TIER_CODE if force_full_match else _TIER_DEG
    while True:
        keys = [
            _sub_ball_key(all_bits[v], bc.balls[v].root, r - 1, tier)
            for v in range(n)
        ]
        if len(set(keys)) == n or tier == _TIER_CODE:
            break
        tier += 1
    unique = len(set(keys))
    if unique != n:
        return ReconstructionResult(
            outcome=Outcome.NOT_APPLICABLE,
            note="(r-1)-ball classes are not pairwise distinct",
            stats={"unique_rm1_balls": unique},
        )
    owner = {key: v for v, key in enumerate(keys)}

    directed: set[tuple[int, int]] = set()
    for v in range(n):
        ball = bc.balls[v]
        bits = all_bits[v]
        for u in ball.adj[ball.root]:
            key = _sub_ball_key(bits, u, r - 1, tier)
            target = owner.get(key)
            if target is None or target == v:
                return ReconstructionResult(
                    outcome=Outcome.INCONSISTENT,
                    note="a neighbour's (r-1)-ball class matches no vertex",
                    stats={"unique_rm1_balls": unique},
                )
            directed.add((v, target))
    if any((b, a) not in directed for a, b in directed):
        return ReconstructionResult(
            outcome=Outcome.INCONSISTENT,
            note="neighbour identification is not symmetric",
            stats={"unique_rm1_balls": unique},
        )
    edges = [(a, b) for a, b in directed if a < b]
    return ReconstructionResult(
        outcome=Outcome.EXACT,
        graph=Graph(n, edges),
        stats={"unique_rm1_balls": unique},
    )


# =========================================================================
# Edge colouring at radius 2
# =========================================================================

FULL = "FULL"
FAST = "FAST"


@dataclass(frozen=True)
class EdgeColour:
    """Isomorphism-invariant colour of an edge, symmetric in its endpoints.

    FULL: canonical class of the joint 2-neighbourhood with the edge
    distinguished. FAST: unordered pair of sorted cross-degree sequences,
    a coarsening of FULL that is far cheaper to compute.
    """

    kind: str
    payload: CanonicalCode | tuple[tuple[int, ...], tuple[int, ...]]

    def sort_key(self) -> tuple:
        if isinstance(self.payload, CanonicalCode):
            return (self.kind, 0, self.payload.data, ())
        return (self.kind, 1, b"", self.payload)


@dataclass(frozen=True)
class ColouredStar:
    """A vertex together with the colour multiset of its incident edges."""

    centre: int
    incident: tuple[tuple[EdgeColour, int], ...]

    def __post_init__(self) -> None:
        ordered = tuple(
            sorted(self.incident, key=lambda item: item[0].sort_key())
        )
        object.__setattr__(self, "incident", ordered)
        if any(count < 1 for _, count in ordered):
            raise ValueError("colour counts must be positive")

    @classmethod
    def from_colours(cls, centre: int, colours: Iterable[EdgeColour]) -> ColouredStar:
        counts = Counter(colours)
        return cls(
            centre=centre,
            incident=tuple(counts.items()),
        )

    def degree(self) -> int:
        return sum(count for _, count in self.incident)


def _ball_edge_colour(
    ball: RootedBall, bits: list[int], v: int, kind: str
) -> EdgeColour:
    """Colour of the edge (root, v) computed inside one endpoint's 2-ball.

    Everything needed is visible: distances from the root are exact
    within the ball, and distance-2 sets around the neighbour are exact
    too because the middle vertex of any such path is adjacent to root
    or neighbour and hence inside the ball.
    """
    root = ball.root
    if kind == FULL:
        _, vorder, vdist = _mask_bfs(bits, v, 2)
        vdmap = {w: d for w, d in zip(vorder, vdist)}
        members = sorted(
            w for w in range(ball.k) if ball.dist[w] <= 2 and vdmap.get(w, 3) <= 2
        )
        member_mask = _mask_of(members)
        local = {w: i for i, w in enumerate(members)}
        edges = [
            (local[a], local[b])
            for a in members
            for b in _bit_indices(bits[a] & member_mask)
            if a < b
        ]
        s = EdgeRootedGraph(
            k=len(members), edges=tuple(edges), u=local[root], v=local[v]
        )
        return EdgeColour(kind=FULL, payload=canonical_code_edge_rooted(s).unordered)
    if kind != FAST:
        raise ValueError(f"unknown colour kind: {kind!r}")
    root_bit = 1 << root
    v_bit = 1 << v
    g1_root = bits[root]
    g1_v = bits[v]
    # distance-exactly-2 sets inside the ball
    g2_root = 0
    for w in _bit_indices(g1_root):
        g2_root |= bits[w]
    g2_root &= ~(g1_root | root_bit)
    g2_v = 0
    for w in _bit_indices(g1_v):
        g2_v |= bits[w]
    g2_v &= ~(g1_v | v_bit)
    into_root = g2_root & ~g1_v
    into_v = g2_v & ~g1_root
    seq_from_v = tuple(
        sorted((bits[w] & into_root).bit_count() for w in _bit_indices(g1_v))
    )
    seq_from_root = tuple(
        sorted((bits[w] & into_v).bit_count() for w in _bit_indices(g1_root))
    )
    pair = tuple(sorted((seq_from_v, seq_from_root)))
    return EdgeColour(kind=FAST, payload=pair)


def _mask_of(members: list[int]) -> int:
    mask = 0
    for w in members:
        mask |= 1 << w
    return mask


def _colour_edge(
    source: Graph | BallCollection, u: int, v: int, kind: str
) -> EdgeColour:
    if isinstance(source, Graph):
        if not source.has_edge(u, v):
            raise ValueError(f"({u}, {v}) is not an edge")
        ball = extract_ball(source, u, 2)
        assert ball.vertices is not None
        v_local = ball.vertices.index(v)
    else:
        ball = source.balls[u]
        v_local = v
        if v_local not in ball.adj[ball.root]:
            raise ValueError(
                f"local vertex {v} is not a neighbour of the root of ball {u}"
            )
    return _ball_edge_colour(ball, _adj_bits(ball), v_local, kind)


def colour_edge_full(source: Graph | BallCollection, u: int, v: int) -> EdgeColour:
    """FULL edge colour of uv.

    With a Graph source, u and v are vertex ids of an edge. With a ball
    collection, u is a root id and v is the local id of a root neighbour
    inside that ball (original ids of non-roots are hidden there).
    """
    return _colour_edge(source, u, v, FULL)


def colour_edge_fast(source: Graph | BallCollection, u: int, v: int) -> EdgeColour:
    """FAST edge colour of uv: unordered pair of sorted counts of edges
    from each endpoint's neighbours into the other endpoint's exact
    distance-2 set (minus the first endpoint's neighbourhood)."""
    return _colour_edge(source, u, v, FAST)


def star_colouring_reconstruct(
    stars: Sequence[ColouredStar],
) -> ReconstructionResult:
    """Rebuild the graph from per-vertex colour multisets.

    Valid whenever no colour class contains two disjoint edges: such a
    class is a single edge, a triangle, or a star, and each case is
    forced by its per-vertex count pattern. Any other pattern proves the
    precondition false.
    """
    for i, star in enumerate(stars):
        if star.centre != i:
            raise ValueError("stars must be listed by centre id 0..n-1")
    n = len(stars)
    per_colour: dict[EdgeColour, dict[int, int]] = {}
    for star in stars:
        for colour, count in star.incident:
            per_colour.setdefault(colour, {})[star.centre] = count
    edges: list[tuple[int, int]] = []
    for colour in sorted(per_colour, key=EdgeColour.sort_key):
        counts = per_colour[colour]
        members = sorted(counts)
        values = sorted(counts.values(), reverse=True)
        if values == [1, 1]:
            edges.append((members[0], members[1]))
        elif values == [2, 2, 2] and len(members) == 3:
            a, b, c = members
            edges.extend([(a, b), (a, c), (b, c)])
        elif (
            len(values) >= 3
            and values[0] >= 2
            and all(x == 1 for x in values[1:])
            and len(values) == values[0] + 1
        ):
            centre = max(counts, key=lambda w: counts[w])
            edges.extend(
                (min(centre, w), max(centre, w)) for w in members if w != centre
            )
        else:
            return ReconstructionResult(
                outcome=Outcome.NOT_APPLICABLE,
                note="a colour class is neither an edge, a star, nor a triangle",
            )
    return ReconstructionResult(outcome=Outcome.EXACT, graph=Graph(n, edges))


def two_ball_reconstruct(bc: BallCollection, mode: str = FAST) -> ReconstructionResult:
    """Exact reconstruction from 2-balls via edge colouring.

    Each vertex's incident edge colours are computed inside its own ball;
    the coloured stars then pin every edge provided no two disjoint
    edges share a colour (detected structurally, yielding
    NOT_APPLICABLE).
    """
    if bc.radius != 2:
        raise ValueError("two-ball reconstruction is defined at radius 2")
    if mode not in (FULL, FAST):
        raise ValueError(f"unknown mode: {mode!r}")
    stars = []
    for v in range(bc.n):
        ball = bc.balls[v]
        bits = _adj_bits(ball)
        colours = [
            _ball_edge_colour(ball, bits, u, mode) for u in ball.adj[ball.root]
        ]
        stars.append(ColouredStar.from_colours(v, colours))
    result = star_colouring_reconstruct(stars)
    if result.outcome is not Outcome.EXACT:
        return ReconstructionResult(
            outcome=Outcome.NOT_APPLICABLE,
            note="colour collision between disjoint edges",
        )
    return result


# =========================================================================
# Hybrid high/low reconstruction
# =========================================================================


def hybrid_high_low_reconstruct(
    bc: BallCollection, p_hint: float | None = None
) -> ReconstructionResult:
    """Reconstruction for radius >= 4 splitting vertices by degree.

    High-degree vertices (>= n*p/2) must have pairwise distinct 3-ball
    classes; the subgraph they induce is rebuilt by overlap on those
    classes. Low-degree vertices must form components of at most r-3
    vertices; each such component, decorated with the identities of its
    high-degree attachments, is read in full from any member's ball, seen
    once per member, and deduplicated by dividing the count by the
    component size. Output is isomorphic; exact when no vertex is
    low-degree.
    """
    r = bc.radius
    if r < 4:
        raise ValueError("hybrid reconstruction needs radius >= 4")
    n = bc.n
    if n == 0:
        return ReconstructionResult(outcome=Outcome.EXACT, graph=Graph(0, []))
    degrees = [len(ball.adj[ball.root]) for ball in bc.balls]
    np_est = n * p_hint if p_hint is not None else sum(degrees) / n
    threshold = np_est / 2.0
    high = [v for v in range(n) if degrees[v] >= threshold]
    low = [v for v in range(n) if degrees[v] < threshold]
    all_bits = [_adj_bits(ball) for ball in bc.balls]

    # --- census of 3-ball classes over high-degree vertices ---
    tier = _TIER_DEG
    while True:
        keys = [
            _sub_ball_key(all_bits[v], bc.balls[v].root, 3, tier) for v in high
        ]
        if len(set(keys)) == len(high) or tier == _TIER_CODE:
            break
        tier += 1
    if len(set(keys)) != len(high):
        return ReconstructionResult(
            outcome=Outcome.NOT_APPLICABLE,
            note="3-ball classes of high-degree vertices are not distinct",
        )
    owner = {key: v for key, v in zip(keys, high)}

    def identify_high(bits: list[int], w: int) -> int | None:
        return owner.get(_sub_ball_key(bits, w, 3, tier))

    # --- edges among high-degree vertices, by overlap ---
    directed: set[tuple[int, int]] = set()
    for v in high:
        ball = bc.balls[v]
        bits = all_bits[v]
        for u in ball.adj[ball.root]:
            # a root neighbour sits at distance 1, so its full degree and
            # 3-ball are visible inside this radius >= 4 ball
            if (bits[u].bit_count()) < threshold:
                continue
            target = identify_high(bits, u)
            if target is None or target == v:
                return ReconstructionResult(
                    outcome=Outcome.INCONSISTENT,
                    note="a high-degree neighbour matches no census class",
                )
            directed.add((v, target))
    if any((b, a) not in directed for a, b in directed):
        return ReconstructionResult(
            outcome=Outcome.INCONSISTENT,
            note="high-degree neighbour identification is not symmetric",
        )
    edges = [(a, b) for a, b in directed if a < b]

    # --- low-degree components, decorated with their attachments ---
    attachment_ids: dict[frozenset[int], int] = {}
    counts: Counter[CanonicalCode] = Counter()
    reps: dict[CanonicalCode, tuple[int, tuple, list[frozenset[int]]]] = {}
    for v in low:
        ball = bc.balls[v]
        bits = all_bits[v]
        root = ball.root
        limit = r - 3
        # BFS from the root over low-degree vertices only; their true
        # degrees are visible because they sit within distance r-1
        members = [root]
        member_mask = 1 << root
        frontier = [root]
        oversized = False
        for _ in range(limit):
            nxt: list[int] = []
            for w in frontier:
                for x in _bit_indices(bits[w] & ~member_mask):
                    if bits[x].bit_count() < threshold:
                        member_mask |= 1 << x
                        members.append(x)
                        nxt.append(x)
            if len(members) > limit:
                oversized = True
                break
            frontier = nxt
            if not frontier:
                break
        if oversized or len(members) > limit:
            return ReconstructionResult(
                outcome=Outcome.NOT_APPLICABLE,
                note=f"a low-degree component exceeds r-3 = {limit} vertices",
            )
        members.sort()
        local = {w: i for i, w in enumerate(members)}
        comp_edges = tuple(
            (local[a], local[b])
            for a in members
            for b in _bit_indices(bits[a] & member_mask)
            if a < b
        )
        attach_sets: list[frozenset[int]] = []
        for w in members:
            ids = set()
            for z in _bit_indices(bits[w] & ~member_mask):
                if bits[z].bit_count() < threshold:
                    # a low-degree neighbour outside the component would
                    # have been swept up by the BFS above
                    return ReconstructionResult(
                        outcome=Outcome.INCONSISTENT,
                        note="low-degree component is not closed in its ball",
                    )
                ident = identify_high(bits, z)
                if ident is None:
                    return ReconstructionResult(
                        outcome=Outcome.INCONSISTENT,
                        note="an attachment matches no census class",
                    )
                ids.add(ident)
            attach_sets.append(frozenset(ids))
        colours = []
        for s in attach_sets:
            key = frozenset(s)
            if key not in attachment_ids:
                attachment_ids[key] = len(attachment_ids)
            colours.append(attachment_ids[key])
        code = canonical_code_coloured(len(members), comp_edges, colours)
        counts[code] += 1
        reps.setdefault(code, (len(members), comp_edges, attach_sets))

    fresh = iter(sorted(low))
    for code in sorted(counts):
        size, comp_edges, attach_sets = reps[code]
        if counts[code] % size != 0:
            return ReconstructionResult(
                outcome=Outcome.INCONSISTENT,
                note="low-degree component multiplicity not divisible by its size",
            )
        for _ in range(counts[code] // size):
            ids = [next(fresh) for _ in range(size)]
            edges.extend((min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in comp_edges)
            for i, attached in enumerate(attach_sets):
                edges.extend(
                    (min(ids[i], z), max(ids[i], z)) for z in sorted(attached)
                )

    outcome = Outcome.EXACT if not low else Outcome.ISOMORPHIC
    return ReconstructionResult(
        outcome=outcome,
        graph=Graph(n, edges),
        stats={"high_count": len(high), "low_count": len(low)},
    )
