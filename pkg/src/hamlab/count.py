"""Exact counting: Hamilton cycles, permanents, factor censuses, perfect
matchings, and the closed-form expectation/bound evaluators.

All exact counts are Python ints. Size caps are module constants; exceeding
one raises CapacityError before any work starts. Memory for the subset DPs
is 8 * (n-1) * 2^(n-1) bytes for Hamilton counting (about 1.5 GB at the cap
of 24) and 8 * 2^n bytes for perfect matchings (128 MB at 24).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .core import (
    BigCount,
    CapacityError,
    Digraph,
    Factor,
    Graph,
    PreconditionError,
)

HAMILTON_DP_CAP = 24          # subset DP over 2^(n-1) masks
HAMILTON_INT64_SAFE = 21      # (n-1)! < 2^63 up to here; beyond, CRT over two moduli
BRUTEFORCE_CAP = 10           # permutation enumeration
PERMANENT_CAP = 30            # Ryser, O(2^n * n)
ENUMERATION_CAP = 12          # factor census backtracking
MATCHINGS_CAP = 24            # subset DP over 2^n masks

_CRT_M1 = 1 << 62
_CRT_M2 = (1 << 62) - 1  # coprime with 2^62; product ~2^124 exceeds 23!


def count_hamilton_cycles(g: Graph, cap: int = HAMILTON_DP_CAP) -> BigCount:
    """Exact Hamilton cycle count by subset DP anchored at vertex 0.

    States are (visited set, endpoint) path counts from vertex 0; closing
    back to 0 counts every cycle once per direction, so the total is halved
    (exactness of the division is asserted).
    """
    n = g.n
    if n > cap:
        raise CapacityError(f"n={n} exceeds Hamilton DP cap {cap}")
    if n < 3:
        return 0
    import numpy as np

    from . import _kernels

    adj = np.array(g.adj, dtype=np.int64)
    if n <= HAMILTON_INT64_SAFE:
        total = int(_kernels.ham_total(adj, n))
    else:
        r1 = int(_kernels.ham_total_mod(adj, n, _CRT_M1))
        r2 = int(_kernels.ham_total_mod(adj, n, _CRT_M2))
        inv = pow(_CRT_M1, -1, _CRT_M2)
        total = r1 + _CRT_M1 * (((r2 - r1) * inv) % _CRT_M2)
    assert total % 2 == 0, "each cycle must be seen in both directions"
    return total // 2


def count_hamilton_cycles_bruteforce(g: Graph, cap: int = BRUTEFORCE_CAP) -> BigCount:
    """Oracle counter: enumerate vertex permutations starting at 0."""
    n = g.n
    if n > cap:
        raise CapacityError(f"n={n} exceeds brute-force cap {cap}")
    if n < 3:
        return 0
    adj = g.adj
    total = 0
    for perm in itertools.permutations(range(1, n)):
        prev = 0
        ok = True
        for v in perm:
            if not (adj[prev] >> v) & 1:
                ok = False
                break
            prev = v
        if ok and (adj[prev] >> 0) & 1:
            total += 1
    assert total % 2 == 0
    return total // 2


def _as_matrix(matrix: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(rows)
    for row in rows:
        if len(row) != n:
            raise PreconditionError("matrix must be square")
        for x in row:
            if x < 0:
                raise PreconditionError("matrix entries must be nonnegative")
    return rows


def permanent(matrix: Sequence[Sequence[int]], cap: int = PERMANENT_CAP) -> BigCount:
    """Permanent of a square nonnegative integer matrix, Ryser's formula with
    Gray-code column updates. Row sums accumulate in plain ints, so the
    result is exact at any magnitude."""
    rows = _as_matrix(matrix)
    n = len(rows)
    if n > cap:
        raise CapacityError(f"n={n} exceeds permanent cap {cap}")
    if n == 0:
        return 1
    sums = [0] * n
    total = 0
    parity = 1  # (-1)^|S| for the current column subset S
    for k in range(1, 1 << n):
        gray_bit = (k & -k).bit_length() - 1
        if (k ^ (k >> 1)) & (1 << gray_bit):
            for i in range(n):
                sums[i] += rows[i][gray_bit]
        else:
            for i in range(n):
                sums[i] -= rows[i][gray_bit]
        parity = -parity
        prod = 1
        for s in sums:
            if s == 0:
                prod = 0
                break
            prod *= s
        total += parity * prod
    return (-1) ** n * total


def permanent_naive(matrix: Sequence[Sequence[int]], cap: int = 8) -> BigCount:
    """Definition-level oracle: sum over all permutations."""
    rows = _as_matrix(matrix)
    n = len(rows)
    if n > cap:
        raise CapacityError(f"n={n} exceeds naive permanent cap {cap}")
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
            if prod == 0:
                break
        total += prod
    return total


@dataclass(frozen=True)
class FactorCensus:
    """Counts of factors keyed by cycle count s. Key 0 appears only for the
    degenerate empty cover, which exists when the budget spans all vertices."""

    by_cycles: dict[int, BigCount]
    allow_uncovered: int

    def __getitem__(self, s: int) -> BigCount:
        return self.by_cycles.get(s, 0)

    def total(self) -> BigCount:
        return sum(self.by_cycles.values())

    def truncated_total(self, s_max: int) -> BigCount:
        return sum(c for s, c in self.by_cycles.items() if s <= s_max)


def count_one_factors(d: Digraph, allow_missing: int = 0) -> FactorCensus:
    """Census of directed cycle covers leaving at most allow_missing vertices
    uncovered, keyed by number of cycles. With allow_missing = 0 the total
    equals the permanent of the adjacency matrix."""
    n = d.n
    if n > ENUMERATION_CAP:
        raise CapacityError(f"n={n} exceeds enumeration cap {ENUMERATION_CAP}")
    if not 0 <= allow_missing <= n:
        raise PreconditionError("allow_missing outside 0..n")
    out = d.out_adj
    full = (1 << n) - 1
    census: dict[int, int] = {}

    def close_or_extend(start: int, cur: int, visited: int, length: int,
                        assigned: int, missing: int, s: int) -> None:
        if length >= 2 and (out[cur] >> start) & 1:
            rec(assigned | visited, missing, s + 1)
        cand = out[cur] & ~(assigned | visited) & full
        while cand:
            low = cand & (-cand)
            w = low.bit_length() - 1
            close_or_extend(start, w, visited | low, length + 1,
                            assigned, missing, s)
            cand ^= low

    def rec(assigned: int, missing: int, s: int) -> None:
        if assigned == full:
            census[s] = census.get(s, 0) + 1
            return
        u = ((~assigned) & full & -((~assigned) & full)).bit_length() - 1
        if missing > 0:
            rec(assigned | (1 << u), missing - 1, s)
        close_or_extend(u, u, 1 << u, 1, assigned, missing, s)

    rec(0, allow_missing, 0)
    return FactorCensus(census, allow_missing)


def count_two_factors(
    g: Graph, allow_isolated: int = 0, max_cycles: int | None = None
) -> FactorCensus:
    """Census of almost 2-factors: vertex-disjoint cycles (length >= 3)
    leaving at most allow_isolated vertices uncovered, keyed by cycle count.

    Backtracking always extends the lowest-indexed undecided vertex; a cycle
    is closed only when its second vertex is smaller than its last, so each
    factor is generated exactly once. max_cycles prunes the census to
    s <= max_cycles (None means unbounded)."""
    n = g.n
    if n > ENUMERATION_CAP:
        raise CapacityError(f"n={n} exceeds enumeration cap {ENUMERATION_CAP}")
    if not 0 <= allow_isolated <= n:
        raise PreconditionError("allow_isolated outside 0..n")
    adj = g.adj
    full = (1 << n) - 1
    s_cap = n if max_cycles is None else max_cycles
    census: dict[int, int] = {}

    def walk(start: int, first: int, cur: int, visited: int, length: int,
             assigned: int, budget: int, s: int) -> None:
        if length >= 3 and first < cur and (adj[cur] >> start) & 1:
            rec(assigned | visited, budget, s + 1)
        cand = adj[cur] & ~(assigned | visited) & full
        while cand:
            low = cand & (-cand)
            w = low.bit_length() - 1
            walk(start, first, w, visited | low, length + 1,
                 assigned, budget, s)
            cand ^= low

    def rec(assigned: int, budget: int, s: int) -> None:
        if assigned == full:
            census[s] = census.get(s, 0) + 1
            return
        rest = (~assigned) & full
        u = (rest & -rest).bit_length() - 1
        if budget > 0:
            rec(assigned | (1 << u), budget - 1, s)
        if s >= s_cap:
            return
        avail = adj[u] & ~assigned & full
        if avail.bit_count() < 2:
            return
        cand = avail
        while cand:
            low = cand & (-cand)
            first = low.bit_length() - 1
            walk(u, first, first, (1 << u) | low, 2, assigned, budget, s)
            cand ^= low

    rec(0, allow_isolated, 0)
    return FactorCensus(census, allow_isolated)


def iter_two_factors(
    g: Graph, allow_isolated: int = 0, max_cycles: int | None = None
) -> Iterator[Factor]:
    """Yield the factors count_two_factors counts, in the same deterministic
    backtracking order."""
    n = g.n
    if n > ENUMERATION_CAP:
        raise CapacityError(f"n={n} exceeds enumeration cap {ENUMERATION_CAP}")
    if not 0 <= allow_isolated <= n:
        raise PreconditionError("allow_isolated outside 0..n")
    adj = g.adj
    full = (1 << n) - 1
    s_cap = n if max_cycles is None else max_cycles

    def walk(start, first, cur, visited, path, assigned, budget, isolated, cycles):
        if len(path) >= 3 and first < cur and (adj[cur] >> start) & 1:
            yield from rec(assigned | visited, budget, isolated,
                           cycles + [tuple(path)])
        cand = adj[cur] & ~(assigned | visited) & full
        while cand:
            low = cand & (-cand)
            w = low.bit_length() - 1
            path.append(w)
            yield from walk(start, first, w, visited | low, path,
                            assigned, budget, isolated, cycles)
            path.pop()
            cand ^= low

    def rec(assigned, budget, isolated, cycles):
        if assigned == full:
            yield Factor.from_components(n, cycles, isolated)
            return
        rest = (~assigned) & full
        u = (rest & -rest).bit_length() - 1
        if budget > 0:
            yield from rec(assigned | (1 << u), budget - 1, isolated + [u], cycles)
        if len(cycles) >= s_cap:
            return
        avail = adj[u] & ~assigned & full
        if avail.bit_count() < 2:
            return
        cand = avail
        while cand:
            low = cand & (-cand)
            first = low.bit_length() - 1
            yield from walk(u, first, first, (1 << u) | low, [u, first],
                            assigned, budget, isolated, cycles)
            cand ^= low

    yield from rec(0, allow_isolated, [], [])


def count_perfect_matchings(g, cap: int = MATCHINGS_CAP) -> BigCount:
    """Exact perfect matching count by subset DP; odd n gives 0.

    Accepts a Graph or anything exposing to_graph() (bipartite covers)."""
    if not isinstance(g, Graph):
        g = g.to_graph()
    n = g.n
    if n > cap:
        raise CapacityError(f"n={n} exceeds matchings cap {cap}")
    if n == 0:
        return 1
    if n % 2:
        return 0
    import numpy as np

    from . import _kernels

    adj = np.array(g.adj, dtype=np.int64)
    return int(_kernels.perfect_matchings(adj, n))


class LogValue(NamedTuple):
    """A quantity computed in log-space; value is +inf-safe."""

    log: float
    value: float


def _log_to_value(log: float) -> float:
    if log == -math.inf:
        return 0.0
    if log > 709.0:
        return math.inf
    return math.exp(log)


def expected_hamilton_cycles(n: int, p: float) -> LogValue:
    """(n-1)! * p^n / 2: the expected Hamilton cycle count of G(n, p)."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p={p} outside [0, 1]")
    if p == 0.0:
        return LogValue(-math.inf, 0.0)
    log = math.lgamma(n) + n * math.log(p) - math.log(2)
    if n <= 170:
        direct = float(math.factorial(n - 1)) * p**n / 2.0
        if direct > 0.0:
            return LogValue(log, direct)
    return LogValue(log, _log_to_value(log))


def expected_two_factor_bound(n_prime: int, p: float, s: int) -> LogValue:
    """(n'-1)! (ln n')^(s-1) p^(n') / ((s-1)! 2^s): an upper bound on the
    expected number of 2-factors with exactly s cycles on n' vertices."""
    if n_prime < 2:
        raise PreconditionError("n_prime must be >= 2")
    if s < 1:
        raise PreconditionError("s must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p={p} outside [0, 1]")
    if p == 0.0:
        return LogValue(-math.inf, 0.0)
    log = (
        math.lgamma(n_prime)
        + (s - 1) * math.log(math.log(n_prime))
        + n_prime * math.log(p)
        - math.lgamma(s)
        - s * math.log(2)
    )
    if n_prime <= 170 and s <= 170:
        direct = (
            float(math.factorial(n_prime - 1))
            * math.log(n_prime) ** (s - 1)
            * p**n_prime
            / (math.factorial(s - 1) * 2.0**s)
        )
        if direct > 0.0:
            return LogValue(log, direct)
    return LogValue(log, _log_to_value(log))


class MatchingBound(NamedTuple):
    """Permanent-based lower bound on perfect matchings of a d-regular
    bipartite graph with parts of size n, plus the weaker (d/e)^n form."""

    log: float
    value: float
    weak_log: float
    weak_value: float


def regular_matchings_lower_bound(d_reg: int, n: int) -> MatchingBound:
    """d^n * n! / n^n, and the weaker (d/e)^n."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if d_reg < 0:
        raise PreconditionError("d_reg must be nonnegative")
    if d_reg == 0:
        return MatchingBound(-math.inf, 0.0, -math.inf, 0.0)
    log = n * math.log(d_reg) + math.lgamma(n + 1) - n * math.log(n)
    weak_log = n * (math.log(d_reg) - 1.0)
    if n <= 170:
        value = float(d_reg) ** n * math.factorial(n) / float(n) ** n
    else:
        value = _log_to_value(log)
    return MatchingBound(log, value, weak_log, _log_to_value(weak_log))


@dataclass(frozen=True)
class DerivedConstants:
    """The derived quantities the asymptotic analysis runs on, evaluated at a
    concrete (n, p). Degenerate at desk scale is expected: d goes negative
    once 100/lnln n > 1, and t0 exists only when np/3000 > 1."""

    n: int
    p: float
    r: float                 # half-degree parameter, np/2
    d: float                 # np - 100 np / lnln n
    s_star: float            # n / (ln n * sqrt(lnln n))
    k: float                 # 17 s* ln n / ln(np)
    t0: int | None           # least t with (np/3000)^(t-1) >= 1/p
    t0_degenerate: bool      # np/3000 <= 1, so no such t exists

    def __post_init__(self) -> None:
        assert self.d < self.n * self.p


def derived_constants(n: int, p: float) -> DerivedConstants:
    """Evaluate the derived constants; requires n >= 16 and np > 1."""
    if n < 16:
        raise PreconditionError("derived constants need n >= 16")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p={p} outside [0, 1]")
    np_ = n * p
    if np_ <= 1.0:
        raise PreconditionError("derived constants need np > 1")
    ln_n = math.log(n)
    lnln_n = math.log(ln_n)
    s_star = n / (ln_n * math.sqrt(lnln_n))
    base = np_ / 3000.0
    t0: int | None
    if base <= 1.0:
        t0, degenerate = None, True
    else:
        t0, acc, degenerate = 1, 1.0, False
        while acc < 1.0 / p:
            acc *= base
            t0 += 1
    return DerivedConstants(
        n=n,
        p=p,
        r=np_ / 2.0,
        d=np_ - 100.0 * np_ / lnln_n,
        s_star=s_star,
        k=17.0 * s_star * ln_n / math.log(np_),
        t0=t0,
        t0_degenerate=degenerate,
    )


def double_count_lower_bound(
    census_total: BigCount, n: int, k: int, max_degree: int
) -> LogValue:
    """census / (C(n, k) * (max_degree + 1)^(2k)): the double-counting lower
    bound on Hamilton cycles given census-many factors, each within Hamming
    distance k of some Hamilton cycle, in a graph of the given max degree.
    k = 0 returns the census itself."""
    if census_total < 0:
        raise PreconditionError("census_total must be nonnegative")
    if not 0 <= k <= n:
        raise PreconditionError(f"k={k} outside 0..n={n}")
    if max_degree < 0:
        raise PreconditionError("max_degree must be nonnegative")
    if census_total == 0:
        return LogValue(-math.inf, 0.0)
    divisor = math.comb(n, k) * (max_degree + 1) ** (2 * k)
    log = (
        math.log(census_total)
        - math.log(math.comb(n, k))
        - 2 * k * math.log(max_degree + 1)
    )
    if log > 700.0:
        return LogValue(log, math.inf)
    return LogValue(log, census_total / divisor)
