"""Canonical forms for rooted balls, edge-rooted structures, and small graphs.

The engine is iterated neighbourhood colour refinement with backtracking
individualization: refinement partitions vertices by (colour, sorted
neighbour colours) until stable; if cells remain, each member of the first
non-singleton cell is individualized in turn and the lexicographically
least leaf encoding wins. Three pruning layers keep the branching from
going factorial, each justified by an explicit automorphism so the least
leaf is preserved: interchangeable twins (equal open or closed
neighbourhoods), double transpositions through private neighbour pairs,
and orbit pruning from automorphisms discovered when the greedy probe
leaves of two sibling branches encode identically.

Roots and distinguished edges are expressed as initial vertex colours, so
one engine serves every variant. Leaf encodings embed the initial colour
values themselves rather than refinement ranks; colour-decorated graphs
with different decoration values therefore never collide.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from shotgun.graph import Graph, RootedBall, extract_ball

__all__ = [
    "CanonicalCode",
    "EdgeCode",
    "EdgeRootedGraph",
    "PLAIN_CODE_CAP",
    "PlainCodeCapError",
    "canonical_code_rooted",
    "canonical_code_edge_rooted",
    "canonical_code_plain",
    "canonical_code_coloured",
    "balls_unique",
    "ball_multiset",
    "ball_invariant",
    "degree_profile",
    "degree_profiles_unique",
    "induced_edge_rooted",
    "BallRecord",
    "write_ball_file",
    "read_ball_file",
]

# Plain (unrooted) codes explore full automorphism backtracking; the cap
# keeps accidental whole-graph calls from hanging. Rooted codes are uncapped
# because ball sizes are bounded by the radius.
PLAIN_CODE_CAP = 512
_COLOUR_LIMIT = 1 << 16


class PlainCodeCapError(ValueError):
    """Raised when a whole-graph code is requested above the size cap.

    Callers holding larger graphs should compare certificates instead of
    canonical codes.
    """


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Relabeling-invariant byte string; equal iff inputs are isomorphic
    under the rooting used to produce it."""

    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, text: str) -> CanonicalCode:
        return cls(bytes.fromhex(text))

    def __repr__(self) -> str:
        return f"CanonicalCode({self.data.hex()})"


@dataclass(frozen=True)
class EdgeCode:
    """Canonical codes of an edge-rooted structure.

    `unordered` treats the distinguished edge as an unordered pair; the
    two ordered codes keep the endpoints apart so callers can decide which
    endpoint corresponds to which under a colour match.
    """

    unordered: CanonicalCode
    as_uv: CanonicalCode
    as_vu: CanonicalCode


@dataclass(frozen=True)
class EdgeRootedGraph:
    """A small graph with one distinguished (unordered) edge.

    Vertices are local ids 0..k-1; `vertices` optionally maps them back to
    ids of an enclosing graph.
    """

    k: int
    edges: tuple[tuple[int, int], ...]
    u: int
    v: int
    vertices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        edges = tuple(sorted((a, b) if a < b else (b, a) for a, b in self.edges))
        object.__setattr__(self, "edges", edges)
        if not (0 <= self.u < self.k and 0 <= self.v < self.k) or self.u == self.v:
            raise ValueError("marked endpoints must be two distinct vertices")
        pair = (min(self.u, self.v), max(self.u, self.v))
        if pair not in set(edges):
            raise ValueError("marked pair is not an edge")
        if self.vertices is not None and len(self.vertices) != self.k:
            raise ValueError("vertex map length disagrees with k")


# =========================================================================
# Engine
# =========================================================================


def _adjacency(k: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(k)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def _refine(k: int, adj: list[list[int]], colours: list[int]) -> list[int]:
    """Stable colour refinement; returns ranks preserving colour order."""
    ncol = len(set(colours))
    while True:
        keys = [
            (colours[v], tuple(sorted(colours[w] for w in adj[v])))
            for v in range(k)
        ]
        rank = {key: i for i, key in enumerate(sorted(set(keys)))}
        new = [rank[keys[v]] for v in range(k)]
        if len(rank) == ncol:
            return new
        ncol = len(rank)
        colours = new


def _twin_representatives(
    cell: list[int], adj: list[list[int]], refined: list[int]
) -> list[int]:
    """One vertex per symmetry class of the cell.

    Vertices with equal open neighbourhoods (non-adjacent twins) or equal
    closed neighbourhoods (adjacent twins) are swapped by a transposition
    automorphism, so branching on one of them suffices. Beyond that, two
    cell vertices u, w whose neighbourhoods differ in exactly one vertex
    each (p and q, same colour) are interchangeable when the double
    transposition (u w)(p q) is an automorphism; this collapses cells
    whose members pair up through private neighbours, where refinement
    alone cannot make progress.
    """
    parent = {v: v for v in cell}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    by_open: dict[frozenset[int], int] = {}
    by_closed: dict[frozenset[int], int] = {}
    for v in cell:
        open_key = frozenset(adj[v])
        closed = open_key | {v}
        for table, key in ((by_open, open_key), (by_closed, closed)):
            if key in table:
                union(table[key], v)
            else:
                table[key] = v

    nbr = {v: set(adj[v]) for v in cell}
    for i, u in enumerate(cell):
        for w in cell[i + 1 :]:
            if find(u) == find(w) or w in nbr[u]:
                continue
            only_u = nbr[u] - nbr[w]
            only_w = nbr[w] - nbr[u]
            if len(only_u) != 1 or len(only_w) != 1:
                continue
            p = next(iter(only_u))
            q = next(iter(only_w))
            if p == q or refined[p] != refined[q]:
                continue
            swap = {u: w, w: u, p: q, q: p}
            mapped_u = {swap.get(z, z) for z in adj[u] if z != p}
            if mapped_u != set(adj[w]) - {q}:
                continue
            mapped_p = {swap.get(z, z) for z in adj[p] if z != u}
            if mapped_p == set(adj[q]) - {w}:
                union(u, w)

    return sorted({find(v) for v in cell})


def _first_nonsingleton(k: int, refined: list[int]) -> list[int] | None:
    """Members of the lowest-ranked colour class with two or more vertices."""
    cells: dict[int, list[int]] = {}
    for v in range(k):
        cells.setdefault(refined[v], []).append(v)
    for c in sorted(cells):
        if len(cells[c]) > 1:
            return cells[c]
    return None


def _encode_leaf(
    k: int,
    adj: list[list[int]],
    refined: list[int],
    init_colours: Sequence[int],
) -> bytes:
    order = sorted(range(k), key=lambda v: refined[v])
    pos = [0] * k
    for i, v in enumerate(order):
        pos[v] = i
    out = bytearray(k.to_bytes(2, "big"))
    for v in order:
        out += init_colours[v].to_bytes(2, "big")
    bits = bytearray((k * (k - 1) // 2 + 7) // 8)
    for v in range(k):
        i = pos[v]
        for w in adj[v]:
            j = pos[w]
            if i < j:
                idx = i * (2 * k - i - 1) // 2 + (j - i - 1)
                bits[idx >> 3] |= 0x80 >> (idx & 7)
    return bytes(out + bits)


def _canonical_bytes(
    k: int, edges: Iterable[tuple[int, int]], init_colours: Sequence[int]
) -> bytes:
    if k == 0:
        raise ValueError("cannot canonize the empty vertex set")
    if any(c < 0 or c >= _COLOUR_LIMIT for c in init_colours):
        raise ValueError("initial colours must fit in 16 bits")
    adj = _adjacency(k, edges)
    best: bytes | None = None

    def leftmost_leaf(colours: list[int]) -> tuple[bytes, list[int]]:
        """Greedy descent taking the first cell member at every level.

        Returns the encoding of the single leaf reached plus the vertex
        order that produced it. Costs one refinement chain, no branching.
        """
        while True:
            refined = _refine(k, adj, colours)
            target = _first_nonsingleton(k, refined)
            if target is None:
                order = sorted(range(k), key=lambda v: refined[v])
                return _encode_leaf(k, adj, refined, init_colours), order
            colours = [c * 2 for c in refined]
            colours[target[0]] -= 1

    def search(colours: list[int]) -> None:
        nonlocal best
        refined = _refine(k, adj, colours)
        target = _first_nonsingleton(k, refined)
        if target is None:
            leaf = _encode_leaf(k, adj, refined, init_colours)
            if best is None or leaf < best:
                best = leaf
            return
        reps = _twin_representatives(target, adj, refined)
        if len(reps) == 1:
            branch = [c * 2 for c in refined]
            branch[reps[0]] -= 1
            search(branch)
            return

        # Orbit pruning: two branches whose greedy probe leaves encode
        # identically yield a permutation (position i of one order to
        # position i of the other) that preserves adjacency and initial
        # colours by construction. When it also stabilizes this node's
        # refined colouring it is an automorphism of the node, so sibling
        # branches in one orbit of the discovered group explore
        # encode-identical subtrees and all but one can be skipped.
        parent = list(range(k))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        probes: dict[bytes, list[int]] = {}
        explored: list[int] = []
        for v in reps:
            if explored and any(find(v) == find(w) for w in explored):
                continue
            branch = [c * 2 for c in refined]
            branch[v] -= 1
            enc, order = leftmost_leaf(branch)
            prev_order = probes.get(enc)
            if prev_order is None:
                probes[enc] = order
            else:
                sigma = [0] * k
                for pos in range(k):
                    sigma[prev_order[pos]] = order[pos]
                if all(refined[sigma[z]] == refined[z] for z in range(k)):
                    for z in range(k):
                        rz, rs = find(z), find(sigma[z])
                        if rz != rs:
                            parent[rs] = rz
                    if any(find(v) == find(w) for w in explored):
                        continue
            explored.append(v)
            search(branch)

    search(list(init_colours))
    assert best is not None
    return best


# =========================================================================
# Public code constructors
# =========================================================================


def canonical_code_rooted(ball: RootedBall) -> CanonicalCode:
    """Code invariant under all relabelings that fix the root."""
    colours = [0] * ball.k
    colours[ball.root] = 1
    return CanonicalCode(_canonical_bytes(ball.k, ball.edges, colours))


def canonical_code_edge_rooted(s: EdgeRootedGraph) -> EdgeCode:
    """Codes invariant under relabelings preserving the distinguished edge.

    Returns the unordered code plus both endpoint-ordered codes; ordered
    codes agree between two structures exactly when an isomorphism exists
    mapping first marked endpoint to first and second to second.
    """
    colours = [0] * s.k
    colours[s.u] = 1
    colours[s.v] = 2
    as_uv = CanonicalCode(_canonical_bytes(s.k, s.edges, colours))
    colours[s.u], colours[s.v] = 2, 1
    as_vu = CanonicalCode(_canonical_bytes(s.k, s.edges, colours))
    return EdgeCode(unordered=min(as_uv, as_vu), as_uv=as_uv, as_vu=as_vu)


def canonical_code_plain(g: Graph) -> CanonicalCode:
    """Whole-graph code; equality decides isomorphism up to the size cap."""
    if g.n > PLAIN_CODE_CAP:
        raise PlainCodeCapError(
            f"plain canonical codes are capped at {PLAIN_CODE_CAP} vertices, got {g.n}"
        )
    if g.n == 0:
        return CanonicalCode(b"\x00\x00")
    return CanonicalCode(
        _canonical_bytes(g.n, g.edges(), [0] * g.n)
    )


def canonical_code_coloured(
    k: int, edges: Iterable[tuple[int, int]], colours: Sequence[int]
) -> CanonicalCode:
    """Code of a vertex-coloured graph: invariant under colour-preserving
    relabelings, and sensitive to the colour values themselves."""
    if len(colours) != k:
        raise ValueError("colour list length disagrees with k")
    return CanonicalCode(_canonical_bytes(k, edges, colours))


def induced_edge_rooted(
    g: Graph, subset: Sequence[int], u: int, v: int
) -> EdgeRootedGraph:
    """Induced subgraph on `subset` with the edge (u, v) distinguished."""
    local = {w: i for i, w in enumerate(subset)}
    if u not in local or v not in local:
        raise ValueError("marked endpoints must lie in the subset")
    edges = [
        (local[a], local[b])
        for a in subset
        for b in g.adj[a]
        if b in local and a < b
    ]
    return EdgeRootedGraph(
        k=len(subset),
        edges=tuple(edges),
        u=local[u],
        v=local[v],
        vertices=tuple(subset),
    )


# =========================================================================
# Ball collections
# =========================================================================


def ball_multiset(g: Graph, r: int) -> tuple[CanonicalCode, ...]:
    """Sorted multiset of the codes of all n rooted r-balls of g."""
    return tuple(
        sorted(canonical_code_rooted(extract_ball(g, v, r)) for v in range(g.n))
    )


def balls_unique(g: Graph, r: int) -> tuple[bool, dict[CanonicalCode, int]]:
    """Whether all n rooted r-ball codes are pairwise distinct.

    Also returns the code histogram, sorted by code for stable output.
    """
    counts = Counter(
        canonical_code_rooted(extract_ball(g, v, r)) for v in range(g.n)
    )
    histogram = {code: counts[code] for code in sorted(counts)}
    unique = all(c == 1 for c in histogram.values())
    return unique, histogram


def ball_invariant(ball: RootedBall) -> tuple:
    """Cheap root-preserving isomorphism invariant of a ball.

    Strictly coarser than the canonical code in general; callers must
    confirm pairwise-distinctness before trusting it as an identifier.
    """
    profile = tuple(
        sorted(
            (
                ball.dist[v],
                len(ball.adj[v]),
                tuple(sorted((ball.dist[w], len(ball.adj[w])) for w in ball.adj[v])),
            )
            for v in range(ball.k)
        )
    )
    return (ball.k, len(ball.edges), len(ball.adj[ball.root]), profile)


# =========================================================================
# Degree profiles
# =========================================================================


def degree_profile(g: Graph, v: int) -> tuple[int, ...]:
    """D(v): sorted multiset of the degrees of v's neighbours."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    return tuple(sorted(g.degree(w) for w in g.adj[v]))


def degree_profiles_unique(g: Graph) -> bool:
    """True iff the neighbour-degree multisets D(v) are pairwise distinct."""
    seen: set[tuple[int, ...]] = set()
    for v in range(g.n):
        profile = degree_profile(g, v)
        if profile in seen:
            return False
        seen.add(profile)
    return len(seen) == g.n


# =========================================================================
# Ball-collection files
# =========================================================================


@dataclass(frozen=True)
class BallRecord:
    """One line of a ball-collection file.

    Codes mode carries the canonical code only; full mode carries the
    ball structure (original vertex ids other than the root are not
    preserved by the format).
    """

    root_id: int
    radius: int
    code: CanonicalCode | None = None
    ball: RootedBall | None = None


def write_ball_file(
    balls: Sequence[RootedBall], path: str | Path, mode: str = "codes"
) -> None:
    """Serialize rooted balls, one record per line.

    Mode "codes" stores canonical codes as hex; mode "full" stores local
    edge lists so reconstruction can consume the file.
    """
    if mode not in ("codes", "full"):
        raise ValueError(f"unknown ball file mode: {mode!r}")
    lines = [f"balls {len(balls)} {mode}"]
    for ball in balls:
        if mode == "codes":
            code = canonical_code_rooted(ball)
            lines.append(f"{ball.root_id} {ball.radius} {code.hex()}")
        else:
            flat = " ".join(f"{a} {b}" for a, b in ball.edges)
            head = f"{ball.root_id} {ball.radius} {ball.k} {len(ball.edges)}"
            lines.append(f"{head} {flat}" if flat else head)
    Path(path).write_text("\n".join(lines) + "\n")


def read_ball_file(path: str | Path) -> list[BallRecord]:
    """Parse a ball-collection file written by :func:`write_ball_file`."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError("empty ball file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "balls":
        raise ValueError(f"bad ball file header: {lines[0]!r}")
    count, mode = int(head[1]), head[2]
    if mode not in ("codes", "full"):
        raise ValueError(f"unknown ball file mode: {mode!r}")
    body = [line for line in lines[1:] if line.strip()]
    if len(body) != count:
        raise ValueError(f"expected {count} records, found {len(body)}")
    records: list[BallRecord] = []
    for line in body:
        parts = line.split()
        if mode == "codes":
            if len(parts) != 3:
                raise ValueError(f"bad codes record: {line!r}")
            records.append(
                BallRecord(
                    root_id=int(parts[0]),
                    radius=int(parts[1]),
                    code=CanonicalCode.from_hex(parts[2]),
                )
            )
        else:
            if len(parts) < 4:
                raise ValueError(f"bad full record: {line!r}")
            root_id, radius, k, m = (int(x) for x in parts[:4])
            flat = [int(x) for x in parts[4:]]
            if len(flat) != 2 * m:
                raise ValueError(f"edge list length mismatch: {line!r}")
            edges = tuple(
                (flat[2 * i], flat[2 * i + 1]) for i in range(m)
            )
            ball = RootedBall(radius=radius, k=k, edges=edges, root_id=root_id)
            records.append(BallRecord(root_id=root_id, radius=radius, ball=ball))
    return records
