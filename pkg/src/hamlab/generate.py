"""Seeded random graph generation: G(n,p), G(n,m), the random graph process,
random orientation, and two-round edge exposure.

All randomness comes from SplitMix64 (Steele/Lea/Flood mixing constants), a
counter-based 64-bit generator: output k of stream(seed) is a pure function
mix(seed + (k+1)*GOLDEN). Everything below uses integer arithmetic only, so
identical seeds give bit-identical results across runs and platforms.
Per-trial seeds are derived with derive_seed(seed, index), the same mixer
applied at an offset counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    Digraph,
    FormatError,
    Graph,
    PreconditionError,
    edge_key,
)

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijection with good avalanche."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Independent sub-seed for trial `index` of a run seeded with `seed`."""
    return mix64((seed + (index + 1) * GOLDEN) & _MASK64)


class Rng:
    """SplitMix64 stream with the few integer helpers the samplers need."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK64
        return mix64(self._state)

    def below(self, bound: int) -> int:
        """Uniform int in [0, bound) by rejection on the smallest mask."""
        if bound <= 0:
            raise PreconditionError("bound must be positive")
        mask = (1 << (bound - 1).bit_length()) - 1 if bound > 1 else 0
        while True:
            r = self.next64() & mask
            if r < bound:
                return r

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def _threshold64(p: float) -> int:
    """Bernoulli(p) becomes draw < threshold on a 64-bit uniform."""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p={p} outside [0, 1]")
    return int(p * 2.0**64)


def all_pairs(n: int) -> list[tuple[int, int]]:
    """The C(n,2) potential edges in canonical order."""
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


GNP_SKIP_THRESHOLD = 0.2  # auto mode: skip-sampling below, dense sweep at or above


def sample_gnp(n: int, p: float, seed: int, mode: str = "auto") -> Graph:
    """Binomial random graph.

    mode 'dense' draws one Bernoulli coin per potential edge; mode 'skip'
    draws geometric gaps between present edges (expected O(p n^2) draws).
    'auto' picks skip iff p < 0.2. The two modes sample the same distribution
    but consume randomness differently, so for one seed they are each
    deterministic without being equal to each other. Geometric inversion is
    exact integer arithmetic (no libm), keeping results platform-independent.
    """
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    if mode == "auto":
        mode = "skip" if p < GNP_SKIP_THRESHOLD else "dense"
    if mode not in ("dense", "skip"):
        raise PreconditionError(f"unknown gnp mode {mode!r}")
    threshold = _threshold64(p)
    rng = Rng(seed)
    m_pairs = n * (n - 1) // 2
    present: list[int] = []
    if mode == "dense" or threshold == 0:
        if threshold > 0:
            for k in range(m_pairs):
                if rng.next64() < threshold:
                    present.append(k)
    else:
        q64 = (1 << 64) - threshold  # failure numerator: q = q64 / 2^64
        k = -1
        while True:
            if q64 == 0:
                skip = 0
            else:
                # smallest j with Q^(j+1) < V * 2^(64 j), V = 2^64 - draw
                v = (1 << 64) - rng.next64()
                lhs = q64
                rhs = v
                skip = 0
                while lhs >= rhs:
                    lhs *= q64
                    rhs <<= 64
                    skip += 1
            k += skip + 1
            if k >= m_pairs:
                break
            present.append(k)
    pairs = all_pairs(n)
    return Graph.from_edges(n, [pairs[k] for k in present])


def sample_gnm(n: int, m: int, seed: int) -> Graph:
    """Uniform graph with exactly m edges (partial Fisher-Yates over pairs)."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise PreconditionError(f"m={m} outside 0..{total}")
    rng = Rng(seed)
    idx = list(range(total))
    for i in range(m):
        j = i + rng.below(total - i) if total > i else i
        idx[i], idx[j] = idx[j], idx[i]
    pairs = all_pairs(n)
    return Graph.from_edges(n, [pairs[k] for k in idx[:m]])


@dataclass(frozen=True)
class ProcessTrace:
    """A full run of the random graph process: a uniform permutation of all
    C(n,2) edges plus the hitting times of minimum degree 1, minimum degree 2,
    and connectivity (numbers of edges, so graph_at(trace, tau) hits them)."""

    n: int
    order: tuple[tuple[int, int], ...]
    tau_min_degree_1: int
    tau_min_degree_2: int
    tau_connected: int

    def __post_init__(self) -> None:
        if len(self.order) != self.n * (self.n - 1) // 2:
            raise PreconditionError("order must list every potential edge")
        if not (
            self.tau_min_degree_1 <= self.tau_min_degree_2
            and self.tau_min_degree_1 <= self.tau_connected
        ):
            raise PreconditionError("hitting times out of order")


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.components = n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            self.components -= 1


def random_process(n: int, seed: int) -> ProcessTrace:
    """One trajectory of the random graph process (n >= 3)."""
    if n < 3:
        raise PreconditionError("random process needs n >= 3")
    rng = Rng(seed)
    order = all_pairs(n)
    rng.shuffle(order)
    deg = [0] * n
    zero, below2 = n, n
    uf = _UnionFind(n)
    tau1 = tau2 = tau_conn = 0
    for t, (u, v) in enumerate(order, start=1):
        for w in (u, v):
            deg[w] += 1
            if deg[w] == 1:
                zero -= 1
            if deg[w] == 2:
                below2 -= 1
        uf.union(u, v)
        if zero == 0 and tau1 == 0:
            tau1 = t
        if below2 == 0 and tau2 == 0:
            tau2 = t
        if uf.components == 1 and tau_conn == 0:
            tau_conn = t
    return ProcessTrace(n, tuple(order), tau1, tau2, tau_conn)


def graph_at(trace: ProcessTrace, t: int) -> Graph:
    """The process graph after its first t edges."""
    if not 0 <= t <= len(trace.order):
        raise PreconditionError(f"t={t} outside 0..{len(trace.order)}")
    return Graph.from_edges(trace.n, trace.order[:t])


_HITTING_SELECTORS = ("min_degree_1", "min_degree_2", "connected")


def process_hitting_graph(trace: ProcessTrace, which: str) -> Graph:
    """The process graph at a hitting time: min_degree_1 | min_degree_2 | connected."""
    taus = {
        "min_degree_1": trace.tau_min_degree_1,
        "min_degree_2": trace.tau_min_degree_2,
        "connected": trace.tau_connected,
    }
    if which not in taus:
        raise PreconditionError(
            f"selector must be one of {_HITTING_SELECTORS}, got {which!r}"
        )
    return graph_at(trace, taus[which])


def orient_randomly(g: Graph, seed: int) -> Digraph:
    """Orient each edge by a fair coin, edges visited in canonical order.
    The result's underlying graph is g."""
    rng = Rng(seed)
    arcs = []
    for u, v in g.edges():
        if rng.next64() >> 63:
            arcs.append((v, u))
        else:
            arcs.append((u, v))
    return Digraph.from_arcs(g.n, arcs)


@dataclass(frozen=True)
class ExposureStream:
    """A base graph plus an ordered stream of booster non-edges.

    Boosters are distinct non-edges of base, none incident to the forbidden
    set; their order is the consumption order."""

    base: Graph
    boosters: tuple[tuple[int, int], ...]
    forbidden: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        for u, v in self.boosters:
            e = edge_key(u, v)
            if u == v:
                raise PreconditionError(f"booster loop at {u}")
            if self.base.has_edge(u, v):
                raise PreconditionError(f"booster ({u}, {v}) already an edge")
            if e in seen:
                raise PreconditionError(f"duplicate booster ({u}, {v})")
            if u in self.forbidden or v in self.forbidden:
                raise PreconditionError(f"booster ({u}, {v}) touches forbidden set")
            seen.add(e)


def two_round_exposure(
    n: int,
    p1: float,
    booster_count: int,
    forbidden: frozenset[int] | set[int] = frozenset(),
    seed: int = 0,
    mode: str = "auto",
) -> ExposureStream:
    """Sample base ~ G(n, p1), then an ordered uniform sample of booster_count
    distinct non-edges avoiding the forbidden set."""
    forbidden = frozenset(forbidden)
    for v in forbidden:
        if not 0 <= v < n:
            raise PreconditionError(f"forbidden vertex {v} out of range")
    base = sample_gnp(n, p1, seed, mode)
    candidates = [
        (u, v)
        for (u, v) in all_pairs(n)
        if not base.has_edge(u, v) and u not in forbidden and v not in forbidden
    ]
    if booster_count < 0:
        raise PreconditionError("booster_count must be nonnegative")
    if booster_count > len(candidates):
        raise PreconditionError(
            f"need {booster_count} boosters but only {len(candidates)} eligible "
            f"non-edges exist (short by {booster_count - len(candidates)})"
        )
    rng = Rng(derive_seed(seed, 1))
    for i in range(booster_count):
        j = i + (rng.below(len(candidates) - i) if len(candidates) > i else 0)
        candidates[i], candidates[j] = candidates[j], candidates[i]
    return ExposureStream(base, tuple(candidates[:booster_count]), forbidden)


def parse_booster_lines(text: str, base: Graph) -> ExposureStream:
    """Booster stream from text: one 'u v' pair per line, file order is the
    consumption order; blank lines and # comments ignored."""
    boosters = []
    for ln in text.split("\n"):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"booster line must be 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"non-integer booster line {ln!r}") from exc
        boosters.append((u, v))
    return ExposureStream(base, tuple(boosters))
