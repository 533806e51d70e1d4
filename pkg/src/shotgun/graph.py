"""Immutable graph representation, seeded G(n,p) sampling, and ball extraction.

The module provides the data layer for everything else: a compact undirected
graph type with sorted adjacency, a counter-based deterministic RNG, a sparse
and a dense G(n,p) sampler, breadth-first r-ball extraction, connected
components, and the plain-text edge-list format.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Graph",
    "GnpParams",
    "RootedBall",
    "sample_gnp",
    "extract_ball",
    "ball_frontier",
    "components",
    "format_edge_list",
    "parse_edge_list",
    "write_edge_list",
    "read_edge_list",
    "splitmix64",
    "derive_seed",
]

# =========================================================================
# Deterministic counter-based RNG (splitmix64)
# =========================================================================

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    """Finalization mix of splitmix64; bijective on 64-bit integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def splitmix64(seed: int, index: int) -> int:
    """Return element `index` of the splitmix64 stream keyed by `seed`.

    The stream is counter-based: any element can be computed independently,
    which keeps parallel consumers reproducible.
    """
    return _mix64((seed + (index + 1) * _GOLDEN) & _MASK64)


def derive_seed(master: int, *parts: int) -> int:
    """Mix integers into a 64-bit sub-seed, splitmix-style.

    Used to key independent random streams (one per trial of a sweep, for
    example) off a single master seed.
    """
    h = master & _MASK64
    for part in parts:
        h = _mix64((h + _GOLDEN + (part & _MASK64)) & _MASK64)
    return h


def _stream_u64(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized splitmix64 values for indices start..start+count-1."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + idx * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def _stream_uniform(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized uniforms in [0, 1) from the keyed stream."""
    return (_stream_u64(seed, start, count) >> np.uint64(11)).astype(np.float64) * (
        2.0**-53
    )


# =========================================================================
# Graph
# =========================================================================


class Graph:
    """Simple undirected graph on vertices 0..n-1 with sorted adjacency.

    Immutable once constructed. Edges are stored per vertex as sorted
    tuples, so membership checks are binary searches and iteration order
    is deterministic everywhere.
    """

    __slots__ = ("n", "adj", "m")

    n: int
    adj: tuple[tuple[int, ...], ...]
    m: int

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen: set[tuple[int, int]] = set()
        neighbours: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            seen.add(key)
            neighbours[u].append(v)
            neighbours[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adj", tuple(tuple(sorted(a)) for a in neighbours))
        object.__setattr__(self, "m", len(seen))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Graph is immutable")

    @classmethod
    def _from_sorted_rows(cls, n: int, rows: np.ndarray) -> Graph:
        """Build from a validated (m, 2) array of edges with u < v, no dups.

        Skips the per-edge checks of `__init__`; callers guarantee the
        invariants (the samplers do by construction).
        """
        obj = object.__new__(cls)
        if len(rows) == 0:
            object.__setattr__(obj, "n", n)
            object.__setattr__(obj, "adj", tuple(() for _ in range(n)))
            object.__setattr__(obj, "m", 0)
            return obj
        src = np.concatenate([rows[:, 0], rows[:, 1]])
        dst = np.concatenate([rows[:, 1], rows[:, 0]])
        order = np.lexsort((dst, src))
        src = src[order]
        dst = dst[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        flat = dst.tolist()
        adj = tuple(
            tuple(flat[offsets[i] : offsets[i + 1]]) for i in range(n)
        )
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "adj", adj)
        object.__setattr__(obj, "m", len(rows))
        return obj

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges (u, v) with u < v in lexicographic order."""
        for u in range(self.n):
            for v in self.adj[u]:
                if v > u:
                    yield (u, v)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GnpParams:
    """Parameters of a seeded Erdos-Renyi sample: G(n, p) under `seed`."""

    n: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


# =========================================================================
# G(n,p) sampling
# =========================================================================

_DENSE_THRESHOLD = 0.1
_CHUNK = 1 << 18


def _pair_offsets(n: int, u: np.ndarray) -> np.ndarray:
    """Index of the first pair with smaller endpoint u, lexicographic order."""
    return u * (2 * n - u - 1) // 2


def _pairs_from_indices(n: int, idx: np.ndarray) -> np.ndarray:
    """Decode lexicographic pair indices into (u, v) rows with u < v.

    Pairs are ordered (0,1), (0,2), ..., (0,n-1), (1,2), ... The float
    solve for the row is corrected by at most one step either way, which
    a fixed two-round adjustment covers for any index below 2^52.
    """
    m = idx.astype(np.float64)
    tn = 2.0 * n - 1.0
    u = np.floor((tn - np.sqrt(tn * tn - 8.0 * m)) / 2.0).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    for _ in range(2):
        u = np.where(_pair_offsets(n, u) > idx, u - 1, u)
        u = np.where(_pair_offsets(n, u + 1) <= idx, u + 1, u)
    v = u + 1 + (idx - _pair_offsets(n, u))
    return np.stack([u, v], axis=1)


def _sample_dense(n: int, p: float, seed: int) -> np.ndarray:
    """Test every pair against one uniform; used for p >= 0.1."""
    total = n * (n - 1) // 2
    hits: list[np.ndarray] = []
    for start in range(0, total, _CHUNK):
        count = min(_CHUNK, total - start)
        u = _stream_uniform(seed, start, count)
        hits.append(np.nonzero(u < p)[0].astype(np.int64) + start)
    if not hits:
        return np.empty((0, 2), dtype=np.int64)
    idx = np.concatenate(hits)
    return _pairs_from_indices(n, idx)


def _sample_sparse(n: int, p: float, seed: int) -> np.ndarray:
    """Skip over non-edges with geometric jumps; used for p < 0.1.

    Consumes the uniform stream sequentially; each uniform yields the gap
    to the next selected pair index, so the edge set is a pure function of
    (n, p, seed) no matter how the batches are sized.
    """
    total = n * (n - 1) // 2
    log1mp = math.log1p(-p)
    selected: list[np.ndarray] = []
    pos = 0  # next candidate pair index
    consumed = 0  # uniforms consumed so far
    batch = 1024
    while pos < total:
        u = _stream_uniform(seed, consumed, batch)
        consumed += batch
        gaps = np.floor(np.log1p(-u) / log1mp).astype(np.int64)
        idx = pos + np.cumsum(gaps + 1) - 1
        take = idx[idx < total]
        selected.append(take)
        if len(take) < len(idx):
            break
        pos = int(idx[-1]) + 1
        batch = min(batch * 2, _CHUNK)
    if not selected:
        return np.empty((0, 2), dtype=np.int64)
    idx_all = np.concatenate(selected)
    return _pairs_from_indices(n, idx_all)


def sample_gnp(params: GnpParams) -> Graph:
    """Sample G(n, p): each unordered pair is an edge independently.

    Deterministic in (n, p, seed). Sparse p uses geometric jumps over the
    lexicographic pair sequence; dense p tests each pair.
    """
    n, p, seed = params.n, params.p, params.seed
    if n < 2 or p == 0.0:
        return Graph(n, [])
    if p >= _DENSE_THRESHOLD:
        rows = _sample_dense(n, p, seed)
    else:
        rows = _sample_sparse(n, p, seed)
    return Graph._from_sorted_rows(n, rows)


# =========================================================================
# Rooted balls
# =========================================================================


@dataclass(frozen=True)
class RootedBall:
    """Induced subgraph on all vertices within distance `radius` of a root.

    Vertices are relabelled to local ids 0..k-1 with the root at local id 0.
    `vertices` maps local ids back to the source graph's ids when known;
    balls loaded from the codes-only file format retain only the root's id.

    Attributes:
        radius: the extraction radius r >= 0.
        k: number of vertices in the ball.
        edges: induced edges in local ids, (u, v) with u < v, sorted.
        root_id: source-graph id of the root.
        vertices: source ids by local id (vertices[0] == root_id), or None.
        root: local id of the root, always 0.
        adj: sorted local adjacency, derived from `edges`.
        dist: distance from the root within the ball, by local id.
    """

    radius: int
    k: int
    edges: tuple[tuple[int, int], ...]
    root_id: int
    vertices: tuple[int, ...] | None = None
    root: int = 0
    adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    dist: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if self.k < 1:
            raise ValueError("a ball contains at least its root")
        if self.vertices is not None:
            if len(self.vertices) != self.k:
                raise ValueError("vertex map length disagrees with k")
            if self.vertices[0] != self.root_id:
                raise ValueError("vertices[0] must be the root id")
        edges = tuple(sorted((u, v) if u < v else (v, u) for u, v in self.edges))
        object.__setattr__(self, "edges", edges)
        neighbours: list[list[int]] = [[] for _ in range(self.k)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at local vertex {u}")
            if not 0 <= u < self.k or not 0 <= v < self.k:
                raise ValueError("edge endpoint outside 0..k-1")
            neighbours[u].append(v)
            neighbours[v].append(u)
        adj = tuple(tuple(sorted(a)) for a in neighbours)
        object.__setattr__(self, "adj", adj)
        # BFS from the root both derives distances and enforces the defining
        # invariant: every vertex is reachable within `radius`.
        dist = [-1] * self.k
        dist[0] = 0
        queue = deque([0])
        while queue:
            w = queue.popleft()
            for x in adj[w]:
                if dist[x] < 0:
                    dist[x] = dist[w] + 1
                    queue.append(x)
        if any(d < 0 for d in dist):
            raise ValueError("ball has vertices unreachable from the root")
        if max(dist) > self.radius:
            raise ValueError("ball has vertices beyond the stated radius")
        object.__setattr__(self, "dist", tuple(dist))

    @classmethod
    def _unchecked(
        cls,
        radius: int,
        k: int,
        edges: tuple[tuple[int, int], ...],
        root_id: int,
        vertices: tuple[int, ...] | None,
        adj: tuple[tuple[int, ...], ...],
        dist: tuple[int, ...],
    ) -> RootedBall:
        """Assemble a ball from pre-validated parts, skipping `__post_init__`.

        Callers must supply sorted edges and adjacency consistent with
        them; `extract_ball` does by construction.
        """
        ball = object.__new__(cls)
        object.__setattr__(ball, "radius", radius)
        object.__setattr__(ball, "k", k)
        object.__setattr__(ball, "edges", edges)
        object.__setattr__(ball, "root_id", root_id)
        object.__setattr__(ball, "vertices", vertices)
        object.__setattr__(ball, "root", 0)
        object.__setattr__(ball, "adj", adj)
        object.__setattr__(ball, "dist", dist)
        return ball

    def without_vertices(self) -> RootedBall:
        """Copy of the ball with the original-id map dropped.

        Reconstruction inputs are normalized this way so no procedure can
        read labels the shotgun setting says it cannot have.
        """
        if self.vertices is None:
            return self
        return RootedBall._unchecked(
            self.radius,
            self.k,
            self.edges,
            self.root_id,
            None,
            self.adj,
            self.dist,
        )


def extract_ball(g: Graph, v: int, r: int) -> RootedBall:
    """Extract the induced subgraph on {w : dist_g(v, w) <= r}, rooted at v."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    if r < 0:
        raise ValueError("radius must be non-negative")
    dist = {v: 0}
    order = [v]
    queue = deque([v])
    while queue:
        w = queue.popleft()
        dw = dist[w]
        if dw == r:
            continue
        for x in g.adj[w]:
            if x not in dist:
                dist[x] = dw + 1
                order.append(x)
                queue.append(x)
    local = [-1] * g.n
    for i, w in enumerate(order):
        local[w] = i
    k = len(order)
    rows: list[list[int]] = []
    edge_list: list[tuple[int, int]] = []
    for a, w in enumerate(order):
        row = []
        for x in g.adj[w]:
            b = local[x]
            if b >= 0:
                row.append(b)
        row.sort()
        rows.append(row)
        for b in row:
            if a < b:
                edge_list.append((a, b))
    edges = tuple(edge_list)
    local_dist = tuple(dist[w] for w in order)
    return RootedBall._unchecked(
        radius=r,
        k=k,
        edges=edges,
        root_id=v,
        vertices=tuple(order),
        adj=tuple(tuple(row) for row in rows),
        dist=local_dist,
    )


def ball_frontier(ball: RootedBall, r: int) -> frozenset[int]:
    """Local ids of vertices at distance exactly r from the root in the ball."""
    if r < 0 or r > ball.radius:
        raise ValueError("frontier radius exceeds ball radius")
    return frozenset(i for i, d in enumerate(ball.dist) if d == r)


# =========================================================================
# Components
# =========================================================================


def components(g: Graph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by minimum vertex."""
    seen = bytearray(g.n)
    out: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = 1
        comp = [start]
        stack = [start]
        while stack:
            w = stack.pop()
            for x in g.adj[w]:
                if not seen[x]:
                    seen[x] = 1
                    comp.append(x)
                    stack.append(x)
        comp.sort()
        out.append(comp)
    return out


# =========================================================================
# Edge-list text format
# =========================================================================


def format_edge_list(g: Graph) -> str:
    """Render a graph as "n m" followed by sorted "u v" lines (u < v)."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format; strict inverse of :func:`format_edge_list`."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    edges: list[tuple[int, int]] = []
    for line in lines[1 : m + 1]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u >= v:
            raise ValueError(f"edge line not in u < v form: {line!r}")
        edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"expected {m} edge lines, found {len(edges)}")
    if any(line.strip() for line in lines[m + 1 :]):
        raise ValueError("trailing content after edge lines")
    if edges != sorted(edges):
        raise ValueError("edge lines not sorted lexicographically")
    g = Graph(n, edges)
    if g.m != m:
        raise ValueError("duplicate edges in input")
    return g


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())
