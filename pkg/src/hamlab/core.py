"""Graph value types, rotations, and the edge-list text format.

Vertices are 0-based ints. Undirected edges are canonical (min, max) tuples
and edge sets are plain frozensets of those tuples. All types here are
immutable values: operations return new objects and never mutate inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

# Exact counts are plain Python ints (arbitrary precision).
BigCount = int


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class CapacityError(ValueError):
    """Input exceeds a documented size cap for an exact procedure."""


class FormatError(ValueError):
    """Malformed text input (edge lists, factor files, configs)."""


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Canonical form of an undirected edge."""
    return (u, v) if u < v else (v, u)


def _check_vertex(v: int, n: int) -> None:
    if not isinstance(v, int) or v < 0 or v >= n:
        raise PreconditionError(f"vertex {v!r} out of range for n={n}")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count plus per-vertex neighbor bitsets."""

    n: int
    adj: tuple[int, ...]  # adj[v] has bit u set iff {u, v} is an edge

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.adj) != self.n:
            raise PreconditionError("adjacency length must equal n")
        full = (1 << self.n) - 1
        for v, mask in enumerate(self.adj):
            if mask & ~full:
                raise PreconditionError(f"adjacency of {v} mentions vertices >= n")
            if (mask >> v) & 1:
                raise PreconditionError(f"loop at vertex {v}")
        for v in range(self.n):
            for u in bits(self.adj[v]):
                if not (self.adj[u] >> v) & 1:
                    raise PreconditionError(f"asymmetric adjacency at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            _check_vertex(u, n)
            _check_vertex(v, n)
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise PreconditionError("cycle graph needs n >= 3")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def has_edge(self, u: int, v: int) -> bool:
        _check_vertex(u, self.n)
        _check_vertex(v, self.n)
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> Iterator[int]:
        return bits(self.adj[v])

    def edges(self) -> tuple[tuple[int, int], ...]:
        """All edges as sorted canonical tuples."""
        out = []
        for v in range(self.n):
            higher = self.adj[v] >> (v + 1)
            for off in bits(higher):
                out.append((v, v + 1 + off))
        return tuple(out)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "Graph":
        """New graph with the given edges added."""
        adj = list(self.adj)
        for u, v in extra:
            _check_vertex(u, self.n)
            _check_vertex(v, self.n)
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return Graph(self.n, tuple(adj))

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == (1 << self.n) - 1


@dataclass(frozen=True)
class Digraph:
    """Simple loop-free directed graph (anti-parallel arc pairs allowed)."""

    n: int
    out_adj: tuple[int, ...]
    in_adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.out_adj) != self.n or len(self.in_adj) != self.n:
            raise PreconditionError("adjacency length must equal n")
        full = (1 << self.n) - 1
        for v in range(self.n):
            if (self.out_adj[v] | self.in_adj[v]) & ~full:
                raise PreconditionError(f"adjacency of {v} mentions vertices >= n")
            if (self.out_adj[v] >> v) & 1:
                raise PreconditionError(f"loop at vertex {v}")
        for v in range(self.n):
            for u in bits(self.out_adj[v]):
                if not (self.in_adj[u] >> v) & 1:
                    raise PreconditionError(f"in/out mismatch at arc ({v}, {u})")
        if sum(m.bit_count() for m in self.out_adj) != sum(
            m.bit_count() for m in self.in_adj
        ):
            raise PreconditionError("in/out arc totals differ")

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        out = [0] * n
        inn = [0] * n
        for u, v in arcs:
            _check_vertex(u, n)
            _check_vertex(v, n)
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            out[u] |= 1 << v
            inn[v] |= 1 << u
        return cls(n, tuple(out), tuple(inn))

    @classmethod
    def complete(cls, n: int) -> "Digraph":
        """All n(n-1) arcs, both directions, no loops."""
        full = (1 << n) - 1
        masks = tuple(full ^ (1 << v) for v in range(n))
        return cls(n, masks, masks)

    def has_arc(self, u: int, v: int) -> bool:
        _check_vertex(u, self.n)
        _check_vertex(v, self.n)
        return bool((self.out_adj[u] >> v) & 1)

    def out_degree(self, v: int) -> int:
        return self.out_adj[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self.in_adj[v].bit_count()

    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (u, v) for u in range(self.n) for v in bits(self.out_adj[u])
        )

    @property
    def arc_count(self) -> int:
        return sum(m.bit_count() for m in self.out_adj)

    def is_orientation(self) -> bool:
        """True when no anti-parallel pair exists (orientation of a simple graph)."""
        return all(
            not (self.out_adj[v] & self.in_adj[v]) for v in range(self.n)
        )


def underlying(d: Digraph) -> Graph:
    """Undirected support of a digraph (anti-parallel pairs collapse)."""
    return Graph(d.n, tuple(d.out_adj[v] | d.in_adj[v] for v in range(d.n)))


class DegreeSummary(NamedTuple):
    per_vertex: tuple[int, ...]
    minimum: int
    maximum: int


def degrees(g: Graph) -> DegreeSummary:
    """Per-vertex degrees with min and max (min=max=0 for n=0)."""
    per = tuple(m.bit_count() for m in g.adj)
    if not per:
        return DegreeSummary((), 0, 0)
    return DegreeSummary(per, min(per), max(per))


def external_neighborhood(g: Graph, s: Iterable[int]) -> frozenset[int]:
    """N(S): vertices outside S with at least one neighbor in S."""
    smask = 0
    for v in s:
        _check_vertex(v, g.n)
        smask |= 1 << v
    nb = 0
    for v in bits(smask):
        nb |= g.adj[v]
    return frozenset(bits(nb & ~smask))


def canonical_cycle(cycle: Iterable[int]) -> tuple[int, ...]:
    """Rotate to start at the smallest vertex, pick the lexicographically
    smaller direction. Identifies the 2k representations of a cycle."""
    seq = tuple(cycle)
    if len(seq) < 3:
        raise PreconditionError("cycle needs at least 3 vertices")
    if len(set(seq)) != len(seq):
        raise PreconditionError("cycle repeats a vertex")
    i = seq.index(min(seq))
    fwd = seq[i:] + seq[:i]
    rev = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, rev)


def cycle_edges(cycle: Iterable[int]) -> frozenset[tuple[int, int]]:
    seq = tuple(cycle)
    return frozenset(
        edge_key(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq))
    )


def is_hamilton_cycle(g: Graph, cycle: Iterable[int]) -> bool:
    """True iff cycle visits every vertex of g exactly once along edges of g."""
    seq = tuple(cycle)
    if g.n < 3 or len(seq) != g.n or len(set(seq)) != g.n:
        return False
    if any(v < 0 or v >= g.n for v in seq):
        return False
    return all(
        (g.adj[seq[i]] >> seq[(i + 1) % g.n]) & 1 for i in range(g.n)
    )


def hamming_distance(a: Iterable[tuple[int, int]], b: Iterable[tuple[int, int]]) -> int:
    """Size of the symmetric difference of two edge sets (a metric)."""
    sa = frozenset(edge_key(u, v) for u, v in a)
    sb = frozenset(edge_key(u, v) for u, v in b)
    return len(sa ^ sb)


def isolated_budget(n: int) -> int:
    """Allowed uncovered vertices in an almost 2-factor: ceil(n / ln^2 n), 0 for n <= 2."""
    if n <= 2:
        return 0
    return math.ceil(n / math.log(n) ** 2)


@dataclass(frozen=True)
class Factor:
    """Vertex-disjoint undirected cycles (length >= 3) plus isolated vertices.

    Covers all n vertices between cycles and isolated set; every covered
    vertex has degree 2, isolated ones degree 0. Cycles are stored canonically
    and sorted; a 2-factor has isolated == empty.
    """

    n: int
    cycles: tuple[tuple[int, ...], ...]
    isolated: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for cyc in self.cycles:
            if len(cyc) < 3:
                raise PreconditionError("factor cycle shorter than 3")
            if cyc != canonical_cycle(cyc):
                raise PreconditionError(f"cycle {cyc} not in canonical form")
            for v in cyc:
                _check_vertex(v, self.n)
                if v in seen:
                    raise PreconditionError(f"vertex {v} in two components")
                seen.add(v)
        for v in self.isolated:
            _check_vertex(v, self.n)
            if v in seen:
                raise PreconditionError(f"vertex {v} both covered and isolated")
            seen.add(v)
        if len(seen) != self.n:
            raise PreconditionError("factor does not account for every vertex")
        if self.cycles != tuple(sorted(self.cycles)):
            raise PreconditionError("cycles not sorted")
        assert 3 * self.s <= self.n - len(self.isolated)

    @classmethod
    def from_components(
        cls, n: int, cycles: Iterable[Iterable[int]], isolated: Iterable[int] = ()
    ) -> "Factor":
        canon = tuple(sorted(canonical_cycle(c) for c in cycles))
        return cls(n, canon, frozenset(isolated))

    @property
    def s(self) -> int:
        """Number of cycles."""
        return len(self.cycles)

    def edges(self) -> frozenset[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for cyc in self.cycles:
            out |= cycle_edges(cyc)
        return frozenset(out)

    def covered(self) -> frozenset[int]:
        return frozenset(v for cyc in self.cycles for v in cyc)

    def is_two_factor(self) -> bool:
        return not self.isolated

    def is_almost_two_factor_of(self, g: Graph, budget: int | None = None) -> bool:
        """Edges lie in g and the isolated set fits the budget
        (default ceil(n / ln^2 n))."""
        if self.n != g.n:
            return False
        limit = isolated_budget(g.n) if budget is None else budget
        if len(self.isolated) > limit:
            return False
        return all((g.adj[u] >> v) & 1 for u, v in self.edges())


@dataclass(frozen=True)
class CycleCover:
    """Vertex-disjoint directed cycles; covered vertices have in- and
    out-degree exactly 1. Stored as vertex sequences, one orientation each,
    starting at the cycle's smallest vertex."""

    n: int
    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for cyc in self.cycles:
            if len(cyc) < 2:
                raise PreconditionError("directed cycle shorter than 2")
            if cyc[0] != min(cyc):
                raise PreconditionError(f"cycle {cyc} must start at its minimum")
            for v in cyc:
                _check_vertex(v, self.n)
                if v in seen:
                    raise PreconditionError(f"vertex {v} in two cycles")
                seen.add(v)
        if self.cycles != tuple(sorted(self.cycles)):
            raise PreconditionError("cycles not sorted")

    def covered(self) -> frozenset[int]:
        return frozenset(v for cyc in self.cycles for v in cyc)

    def successor(self) -> dict[int, int]:
        """The bijection on covered vertices the cycles define."""
        succ: dict[int, int] = {}
        for cyc in self.cycles:
            for i, v in enumerate(cyc):
                succ[v] = cyc[(i + 1) % len(cyc)]
        return succ

    def arcs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.successor().items())

    def is_cover_of(self, d: Digraph) -> bool:
        if self.n != d.n:
            return False
        return all((d.out_adj[u] >> v) & 1 for u, v in self.arcs())


@dataclass(frozen=True)
class RotationPath:
    """A path under rotation: vertex sequence, the fixed endpoint is
    vertices[0]; broken records edges deleted by rotations so far."""

    vertices: tuple[int, ...]
    broken: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    rotations_done: int = 0

    def __post_init__(self) -> None:
        if not self.vertices:
            raise PreconditionError("empty path")
        if len(set(self.vertices)) != len(self.vertices):
            raise PreconditionError("path repeats a vertex")

    @property
    def fixed_endpoint(self) -> int:
        return self.vertices[0]

    @property
    def endpoint(self) -> int:
        """The free (rotating) endpoint."""
        return self.vertices[-1]

    def path_edges(self) -> frozenset[tuple[int, int]]:
        vs = self.vertices
        return frozenset(edge_key(vs[i], vs[i + 1]) for i in range(len(vs) - 1))


def rotate(p: RotationPath, g: Graph, pivot: int) -> RotationPath:
    """One rotation with fixed endpoint v_1.

    pivot is the 1-based position i of the pivot vertex, 1 <= i <= q-2;
    requires the edge (v_q, v_i) in g. Result is (v_1..v_i, v_q, .., v_{i+1});
    the broken set gains the deleted path edge (v_i, v_{i+1}).
    """
    vs = p.vertices
    q = len(vs)
    if q < 3:
        raise PreconditionError("rotation needs a path on >= 3 vertices")
    if not 1 <= pivot <= q - 2:
        raise PreconditionError(f"pivot {pivot} outside 1..{q - 2}")
    if not (g.adj[vs[q - 1]] >> vs[pivot - 1]) & 1:
        raise PreconditionError(
            f"pivot edge ({vs[q - 1]}, {vs[pivot - 1]}) not in graph"
        )
    new_vertices = vs[:pivot] + tuple(reversed(vs[pivot:]))
    gained = edge_key(vs[pivot - 1], vs[pivot])
    return RotationPath(
        new_vertices, p.broken | {gained}, p.rotations_done + 1
    )


# --- edge-list text format ---------------------------------------------------
# First line "n m", then m lines "u v" with 0 <= u < v < n. ASCII, LF endings.


def parse_edge_list(text: str) -> Graph:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise FormatError("empty edge list")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"non-integer header {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise FormatError("negative n or m")
    if len(lines) - 1 != m:
        raise FormatError(f"header says m={m} but {len(lines) - 1} edge lines follow")
    seen: set[tuple[int, int]] = set()
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"edge line must be 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"non-integer edge line {ln!r}") from exc
        if u == v:
            raise FormatError(f"loop at vertex {u}")
        if not (0 <= u < v < n):
            raise FormatError(f"edge ({u}, {v}) violates 0 <= u < v < n={n}")
        if (u, v) in seen:
            raise FormatError(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
