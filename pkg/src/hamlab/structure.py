"""Structural certification procedures.

Everything here decides or certifies a combinatorial property of a fixed
graph: low-degree vertex sets, expansion certificates with replayable
witnesses, directed edge-distribution checks, degree-window core extraction,
bipartite double covers, and spanning regular subgraph extraction via flows.
All functions are pure; sampled modes draw from the seeded generator stream
and mark their output as sampled evidence rather than proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from typing import NamedTuple

from .core import (
    CapacityError,
    Digraph,
    FormatError,
    Graph,
    PreconditionError,
    bits,
    external_neighborhood,
    canonical_cycle,
)
from .generate import Rng

EXPANDER_EXACT_CAP = 20   # subset enumeration for the expansion property
EDGE_CHECK_EXACT_CAP = 14  # all subset pairs, O(4^n)
ORE_RYSER_SUBSET_CAP = 16  # brute-force subset condition
VIOLATION_CAP = 100        # recorded witnesses per property
EDGE_VIOLATION_CAP = 1000  # recorded (A, B) pairs; the full count is kept
SAMPLES_PER_SIZE = 10_000


@dataclass(frozen=True)
class ConstantsProfile:
    """The numeric knobs of the structural definitions.

    Defaults are the canonical values; tests exercise alternative profiles
    to make sure nothing is hard-coded.
    """

    low_degree_divisor: float = 100.0
    expander_size_exponent: float = 0.09
    short_path_factor: float = 2.0 / 3.0
    expansion_divisor: float = 1000.0
    edge_density_coeff: float = 0.8
    set_size_cap: float = 0.6
    rotation_divisor: float = 3000.0
    endpoint_fraction: float = 1.0 / 3000.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise PreconditionError(f"{f.name} must be positive")


DEFAULT_CONSTANTS = ConstantsProfile()

_CONSTANT_NAMES = tuple(f.name for f in fields(ConstantsProfile))


def parse_constants_profile(text: str) -> ConstantsProfile:
    """Flat key=value lines; blank lines and # comments are skipped.

    Unknown keys are rejected rather than ignored so that a typo cannot
    silently fall back to a default.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise FormatError(f"line {lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        if key not in _CONSTANT_NAMES:
            raise FormatError(f"line {lineno}: unknown constant {key!r}")
        if key in values:
            raise FormatError(f"line {lineno}: duplicate constant {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise FormatError(f"line {lineno}: bad value for {key!r}: {val.strip()!r}") from None
    return ConstantsProfile(**values)


def format_constants_profile(consts: ConstantsProfile) -> str:
    return "".join(f"{name}={getattr(consts, name)!r}\n" for name in _CONSTANT_NAMES)


class Violation(NamedTuple):
    """A concrete refutation of one certified property.

    property_id is one of "size", "short-path", "expansion"; the witness is
    a vertex tuple: the whole low-degree set, a path (closed when the two
    endpoints coincide), or the non-expanding set S.
    """

    property_id: str
    witness: tuple[int, ...]


@dataclass(frozen=True)
class ExpanderCertificate:
    is_expander: bool
    d_set: frozenset[int]
    violations: tuple[Violation, ...]
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "sampled"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.is_expander and self.violations:
            raise PreconditionError("positive certificate cannot carry violations")


def low_degree_set(g: Graph, threshold: float) -> frozenset[int]:
    """Vertices of degree strictly below the threshold."""
    return frozenset(v for v in range(g.n) if g.degree(v) < threshold)


def short_path_bound(n: int, consts: ConstantsProfile = DEFAULT_CONSTANTS) -> int:
    """Floor of factor * ln(n)/ln(ln(n)); needs n >= 3 to be defined."""
    if n < 3:
        raise PreconditionError("path-length bound needs n >= 3")
    return math.floor(consts.short_path_factor * math.log(n) / math.log(math.log(n)))


def _short_path_violations(g: Graph, d_set: frozenset[int], limit: int, cap: int) -> list[tuple[int, ...]]:
    """Simple paths of length 1..limit with both endpoints in d_set.

    Closed paths (cycles of length >= 3 through a d_set vertex) count as
    having identical endpoints. Interior vertices are unrestricted. Search
    order is start-ascending, neighbor-ascending; witnesses are canonicalized
    and deduplicated, and the scan stops once cap witnesses are recorded.
    """
    out: list[tuple[int, ...]] = []
    if limit < 1 or not d_set:
        return out
    seen: set[tuple] = set()

    def emit(walk: list[int]) -> None:
        if walk[0] == walk[-1]:
            cyc = canonical_cycle(walk[:-1])
            wit = cyc + (cyc[0],)
            key: tuple = ("c", cyc)
        else:
            fwd = tuple(walk)
            rev = tuple(reversed(walk))
            wit = min(fwd, rev)
            key = ("p", wit)
        if key not in seen:
            seen.add(key)
            out.append(wit)

    def dfs(path: list[int], used: int) -> None:
        if len(out) >= cap:
            return
        edges_next = len(path)  # edge count after appending one vertex
        for u in bits(g.adj[path[-1]]):
            if len(out) >= cap:
                return
            if u == path[0]:
                if 3 <= edges_next <= limit:
                    emit(path + [u])
                continue
            if used >> u & 1 or edges_next > limit:
                continue
            if u in d_set:
                emit(path + [u])
            if edges_next < limit:
                path.append(u)
                dfs(path, used | 1 << u)
                path.pop()

    for start in sorted(d_set):
        if len(out) >= cap:
            break
        dfs([start], 1 << start)
    return out


def _neighborhood_size(g: Graph, smask: int) -> int:
    nb = 0
    for v in bits(smask):
        nb |= g.adj[v]
    return (nb & ~smask).bit_count()


def _sample_subset(rng: Rng, pool: list[int], k: int) -> list[int]:
    """First k entries of a partial Fisher-Yates pass over a copy of pool."""
    items = list(pool)
    for i in range(k):
        j = i + rng.below(len(items) - i)
        items[i], items[j] = items[j], items[i]
    return items[:k]


def certify_p_expander(
    g: Graph,
    p: float,
    consts: ConstantsProfile = DEFAULT_CONSTANTS,
    mode: str = "exact",
    seed: int = 0,
) -> ExpanderCertificate:
    """Certify the three-part expansion property against the derived set D.

    D is the set of vertices with degree below n*p/low_degree_divisor. The
    checks: (size) |D| <= n^exponent; (short-path) no non-empty path of
    length at most floor(factor*ln n/ln ln n) with both (possibly identical)
    endpoints in D; (expansion) every S outside D with |S| <= floor(1/p) has
    external neighborhood at least (n*p/expansion_divisor)*|S|.

    Exact mode enumerates every subset for the expansion property and needs
    n <= 20; sampled mode draws SAMPLES_PER_SIZE sets per size instead and
    marks the certificate accordingly. At most VIOLATION_CAP witnesses are
    recorded per property.
    """
    if mode not in ("exact", "sampled"):
        raise PreconditionError(f"unknown mode {mode!r}")
    if not 0 < p <= 1:
        raise PreconditionError("p must be in (0, 1]")
    n = g.n
    if n < 3:
        raise PreconditionError("certification needs n >= 3")
    if mode == "exact" and n > EXPANDER_EXACT_CAP:
        raise CapacityError(f"exact mode handles n <= {EXPANDER_EXACT_CAP}, got {n}")

    d_set = low_degree_set(g, n * p / consts.low_degree_divisor)
    violations: list[Violation] = []

    if len(d_set) > n**consts.expander_size_exponent:
        violations.append(Violation("size", tuple(sorted(d_set))))

    limit = short_path_bound(n, consts)
    for wit in _short_path_violations(g, d_set, limit, VIOLATION_CAP):
        violations.append(Violation("short-path", wit))

    need = n * p / consts.expansion_divisor
    rest = sorted(set(range(n)) - d_set)
    s_max = min(math.floor(1 / p), len(rest))
    recorded = 0
    if mode == "exact":
        for size in range(1, s_max + 1):
            if recorded >= VIOLATION_CAP:
                break
            for combo in itertools.combinations(rest, size):
                smask = 0
                for v in combo:
                    smask |= 1 << v
                if _neighborhood_size(g, smask) < need * size:
                    violations.append(Violation("expansion", combo))
                    recorded += 1
                    if recorded >= VIOLATION_CAP:
                        break
    else:
        rng = Rng(seed)
        seen_masks: set[int] = set()
        for size in range(1, s_max + 1):
            if recorded >= VIOLATION_CAP:
                break
            for _ in range(SAMPLES_PER_SIZE):
                combo = sorted(_sample_subset(rng, rest, size))
                smask = 0
                for v in combo:
                    smask |= 1 << v
                if smask in seen_masks:
                    continue
                if _neighborhood_size(g, smask) < need * size:
                    seen_masks.add(smask)
                    violations.append(Violation("expansion", tuple(combo)))
                    recorded += 1
                    if recorded >= VIOLATION_CAP:
                        break

    return ExpanderCertificate(
        is_expander=not violations,
        d_set=d_set,
        violations=tuple(violations),
        mode=mode,
    )


def verify_violation(
    g: Graph,
    p: float,
    violation: Violation,
    consts: ConstantsProfile = DEFAULT_CONSTANTS,
) -> bool:
    """Replay a witness against the graph it was issued for."""
    n = g.n
    d_set = low_degree_set(g, n * p / consts.low_degree_divisor)
    kind, wit = violation
    if kind == "size":
        return tuple(sorted(d_set)) == wit and len(wit) > n**consts.expander_size_exponent
    if kind == "short-path":
        if len(wit) < 2:
            return False
        length = len(wit) - 1
        if length > short_path_bound(n, consts):
            return False
        if wit[0] == wit[-1]:
            # Closed: a cycle through a low-degree vertex, anchored anywhere.
            interior = wit[:-1]
            if length < 3 or len(set(interior)) != len(interior):
                return False
            if not d_set.intersection(interior):
                return False
        else:
            if wit[0] not in d_set or wit[-1] not in d_set:
                return False
            if len(set(wit)) != len(wit):
                return False
        return all(g.has_edge(a, b) for a, b in zip(wit, wit[1:]))
    if kind == "expansion":
        s = set(wit)
        if not s or len(s) != len(wit) or s & d_set:
            return False
        if any(not 0 <= v < n for v in s) or len(s) > math.floor(1 / p):
            return False
        need = n * p / consts.expansion_divisor
        return len(external_neighborhood(g, s)) < need * len(s)
    raise PreconditionError(f"unknown property id {kind!r}")


class EdgeViolation(NamedTuple):
    a: tuple[int, ...]
    b: tuple[int, ...]
    arcs: int
    threshold: float


@dataclass(frozen=True)
class EdgeDistributionReport:
    violations: tuple[EdgeViolation, ...]
    mode: str
    total: int        # full violation count in exact mode
    truncated: bool   # True when more violations exist than were recorded


def _arcs_between(d: Digraph, amask: int, bmask: int) -> int:
    return sum((d.out_adj[u] & bmask).bit_count() for u in bits(amask))


def edge_distribution_check(
    d: Digraph,
    r: float,
    consts: ConstantsProfile = DEFAULT_CONSTANTS,
    mode: str = "exact",
    seed: int = 0,
) -> EdgeDistributionReport:
    """Find subset pairs with too many arcs from A to B.

    A pair violates when e(A, B) > coeff*r*sqrt(|A|*|B|) and both sizes are
    at most floor(set_size_cap*n). A and B range over all non-empty vertex
    subsets and may overlap. Exact mode sweeps every pair (n <= 14); sampled
    mode draws SAMPLES_PER_SIZE random pairs. At most EDGE_VIOLATION_CAP
    pairs are recorded; the exact total is reported either way.
    """
    if mode not in ("exact", "sampled"):
        raise PreconditionError(f"unknown mode {mode!r}")
    if r <= 0:
        raise PreconditionError("r must be positive")
    n = d.n
    size_cap = math.floor(consts.set_size_cap * n)
    if size_cap < 1:
        return EdgeDistributionReport((), mode, 0, False)

    def make_violation(amask: int, bmask: int) -> EdgeViolation:
        asize = amask.bit_count()
        bsize = bmask.bit_count()
        return EdgeViolation(
            a=tuple(bits(amask)),
            b=tuple(bits(bmask)),
            arcs=_arcs_between(d, amask, bmask),
            threshold=consts.edge_density_coeff * r * math.sqrt(asize * bsize),
        )

    if mode == "exact":
        if n > EDGE_CHECK_EXACT_CAP:
            raise CapacityError(f"exact mode handles n <= {EDGE_CHECK_EXACT_CAP}, got {n}")
        import numpy as np

        from ._kernels import edge_density_violations

        thresholds = np.empty((size_cap + 1, size_cap + 1), dtype=np.float64)
        for i in range(size_cap + 1):
            for j in range(size_cap + 1):
                thresholds[i, j] = consts.edge_density_coeff * r * math.sqrt(i * j)
        in_adj = np.array(d.in_adj, dtype=np.int64)
        count, out_a, out_b = edge_density_violations(
            in_adj, n, size_cap, thresholds, EDGE_VIOLATION_CAP
        )
        recorded = min(count, EDGE_VIOLATION_CAP)
        found = [make_violation(int(out_a[i]), int(out_b[i])) for i in range(recorded)]
        return EdgeDistributionReport(tuple(found), "exact", count, count > recorded)

    rng = Rng(seed)
    pool = list(range(n))
    seen: set[tuple[int, int]] = set()
    found = []
    truncated = False
    for _ in range(SAMPLES_PER_SIZE):
        asize = 1 + rng.below(size_cap)
        bsize = 1 + rng.below(size_cap)
        amask = 0
        for v in _sample_subset(rng, pool, asize):
            amask |= 1 << v
        bmask = 0
        for v in _sample_subset(rng, pool, bsize):
            bmask |= 1 << v
        if (amask, bmask) in seen:
            continue
        seen.add((amask, bmask))
        arcs = _arcs_between(d, amask, bmask)
        if arcs > consts.edge_density_coeff * r * math.sqrt(asize * bsize):
            if len(found) >= EDGE_VIOLATION_CAP:
                truncated = True
                break
            found.append(make_violation(amask, bmask))
    return EdgeDistributionReport(tuple(found), "sampled", len(found), truncated)


def degree_window_core(d: Digraph, low: float, high: float) -> frozenset[int]:
    """Peel vertices whose induced in- or out-degree leaves [low, high).

    Removal is simultaneous per round and iterates to a fixed point, so the
    result is well-defined on every input and idempotent.
    """
    if not low < high:
        raise PreconditionError("window needs low < high")
    alive = (1 << d.n) - 1
    while True:
        kill = 0
        for v in bits(alive):
            dout = (d.out_adj[v] & alive).bit_count()
            din = (d.in_adj[v] & alive).bit_count()
            if not (low <= dout < high and low <= din < high):
                kill |= 1 << v
        if not kill:
            return frozenset(bits(alive))
        alive &= ~kill


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph on parts X = [nx], Y = [ny]; adj[x] masks Y."""

    nx: int
    ny: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.nx < 0 or self.ny < 0:
            raise PreconditionError("part sizes must be nonnegative")
        if len(self.adj) != self.nx:
            raise PreconditionError("adjacency length must equal nx")
        full = (1 << self.ny) - 1
        for x, mask in enumerate(self.adj):
            if mask & ~full:
                raise PreconditionError(f"row {x} references vertices outside Y")

    @staticmethod
    def from_edges(nx: int, ny: int, edges) -> "BipartiteGraph":
        rows = [0] * nx
        for x, y in edges:
            if not (0 <= x < nx and 0 <= y < ny):
                raise PreconditionError(f"edge ({x}, {y}) out of range")
            rows[x] |= 1 << y
        return BipartiteGraph(nx, ny, tuple(rows))

    @staticmethod
    def complete(nx: int, ny: int) -> "BipartiteGraph":
        full = (1 << ny) - 1
        return BipartiteGraph(nx, ny, (full,) * nx)

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self.adj[x] >> y & 1)

    def degree_x(self, x: int) -> int:
        return self.adj[x].bit_count()

    def degree_y(self, y: int) -> int:
        return sum(mask >> y & 1 for mask in self.adj)

    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, y) for x in range(self.nx) for y in bits(self.adj[x]))

    @property
    def edge_count(self) -> int:
        return sum(mask.bit_count() for mask in self.adj)

    def to_graph(self) -> Graph:
        """Flatten to a plain graph with Y relabeled to nx..nx+ny-1."""
        return Graph.from_edges(
            self.nx + self.ny,
            ((x, self.nx + y) for x, y in self.edges()),
        )


def bipartite_double_cover(d: Digraph) -> BipartiteGraph:
    """x_X ~ y_Y exactly when the arc x->y exists.

    Perfect matchings of the cover correspond one-to-one with spanning
    1-regular arc sets of the digraph, hence with permanent(adjacency).
    """
    return BipartiteGraph(d.n, d.n, d.out_adj)


class NoRegularSubgraphError(ValueError):
    """No spanning d-regular subgraph exists; carries the violating Y'."""

    def __init__(self, message: str, witness: tuple[int, ...]):
        super().__init__(message)
        self.witness = witness


class OreRyserResult(NamedTuple):
    ok: bool
    witness: tuple[int, ...] | None


def _regular_flow(b: BipartiteGraph, d_reg: int):
    """Max flow for the spanning d-regular subgraph network.

    Node ids: X vertices 0..nx-1, Y vertices nx..nx+ny-1, then source and
    sink. Edmonds-Karp with BFS over ascending node ids, so the flow (and
    the extracted subgraph) is deterministic for a given input.
    """
    nx, ny = b.nx, b.ny
    src = nx + ny
    snk = nx + ny + 1
    total = nx + ny + 2
    cap = [dict() for _ in range(total)]
    for x in range(nx):
        cap[src][x] = d_reg
        cap[x][src] = 0
    for x in range(nx):
        for y in bits(b.adj[x]):
            cap[x][nx + y] = 1
            cap[nx + y][x] = 0
    for y in range(ny):
        cap[nx + y][snk] = d_reg
        cap[snk][nx + y] = 0

    value = 0
    while True:
        parent = {src: src}
        queue = [src]
        for u in queue:
            if u == snk:
                break
            for v in sorted(cap[u]):
                if v not in parent and cap[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if snk not in parent:
            return value, cap, parent
        bottleneck = min(
            cap[parent[v]][v]
            for v in _walk_back(parent, snk, src)
        )
        for v in _walk_back(parent, snk, src):
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
        value += bottleneck


def _walk_back(parent: dict[int, int], node: int, src: int):
    while node != src:
        yield node
        node = parent[node]


def ore_ryser_check(b: BipartiteGraph, d_reg: int, method: str = "flow") -> OreRyserResult:
    """Decide existence of a spanning d_reg-regular subgraph.

    The subset method checks d*|Y'| <= sum_x min(d, e(x, Y')) over every
    Y' in ascending mask order (|Y| <= 16); the flow method decides the same
    predicate by max flow and, on failure, reads a violating Y' off the
    minimum cut (the Y vertices unreachable from the source in the residual
    network). The two agree on every input.
    """
    if b.nx != b.ny:
        raise PreconditionError(f"part sizes differ: {b.nx} vs {b.ny}")
    if d_reg < 0:
        raise PreconditionError("regularity must be nonnegative")
    if method not in ("subset", "flow"):
        raise PreconditionError(f"unknown method {method!r}")
    if d_reg == 0:
        return OreRyserResult(True, None)
    if method == "subset":
        if b.ny > ORE_RYSER_SUBSET_CAP:
            raise CapacityError(f"subset method handles |Y| <= {ORE_RYSER_SUBSET_CAP}")
        for ymask in range(1, 1 << b.ny):
            lhs = d_reg * ymask.bit_count()
            rhs = sum(min(d_reg, (row & ymask).bit_count()) for row in b.adj)
            if lhs > rhs:
                return OreRyserResult(False, tuple(bits(ymask)))
        return OreRyserResult(True, None)
    value, _, parent = _regular_flow(b, d_reg)
    if value == d_reg * b.nx:
        return OreRyserResult(True, None)
    witness = tuple(y for y in range(b.ny) if b.nx + y not in parent)
    return OreRyserResult(False, witness)


def extract_regular_subgraph(b: BipartiteGraph, d_reg: int) -> BipartiteGraph:
    """Spanning subgraph with every degree exactly d_reg, or an error.

    Saturated unit arcs of the deterministic max flow become the edges, so
    identical inputs always extract the identical subgraph.
    """
    if b.nx != b.ny:
        raise PreconditionError(f"part sizes differ: {b.nx} vs {b.ny}")
    if d_reg < 0:
        raise PreconditionError("regularity must be nonnegative")
    if d_reg == 0:
        return BipartiteGraph(b.nx, b.ny, (0,) * b.nx)
    value, cap, parent = _regular_flow(b, d_reg)
    if value != d_reg * b.nx:
        witness = tuple(y for y in range(b.ny) if b.nx + y not in parent)
        raise NoRegularSubgraphError(
            f"no spanning {d_reg}-regular subgraph; violating Y' = {witness}",
            witness,
        )
    rows = [0] * b.nx
    for x in range(b.nx):
        for y in bits(b.adj[x]):
            if cap[x][b.nx + y] == 0:
                rows[x] |= 1 << y
    return BipartiteGraph(b.nx, b.ny, tuple(rows))
