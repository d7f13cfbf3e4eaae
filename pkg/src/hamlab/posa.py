"""Rotation-extension engine.

Grows endpoint sets of a path by rotations with one endpoint fixed, extends
paths out of their vertex set, and converts an almost-2-factor into a
Hamilton cycle by repeatedly splicing components into a working path,
rotating when stuck, and spending booster edges to close or extend. Every
nondeterministic choice is resolved by smallest-vertex or smallest-edge
order so identical inputs give identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import (
    Factor,
    FormatError,
    Graph,
    PreconditionError,
    RotationPath,
    bits,
    canonical_cycle,
    cycle_edges,
    degrees,
    edge_key,
    hamming_distance,
    is_hamilton_cycle,
    rotate,
)
from .generate import ExposureStream, Rng, derive_seed
from .structure import ConstantsProfile, DEFAULT_CONSTANTS


@dataclass(frozen=True)
class RotationBudget:
    """Caps for one merge: rotation depth, endpoint target, vertices to
    steer around. The closure keeps rotating past the depth cap while the
    endpoint set is still below target, so a target above 1 buys
    exhaustiveness on graphs too small for the depth formula to bite."""

    max_rotations_per_merge: int
    target_endpoint_count: int
    avoid_set: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.max_rotations_per_merge < 1 or self.target_endpoint_count < 1:
            raise PreconditionError("budgets must be positive")

    @staticmethod
    def from_params(
        n: int,
        p: float,
        consts: ConstantsProfile = DEFAULT_CONSTANTS,
        avoid_set=frozenset(),
    ) -> "RotationBudget":
        """Depth 3*ln(n)/ln(np) rounded up, endpoint target n/3000.

        Both are clamped to [1, n]: below np = e the depth formula explodes
        or goes negative and the cap n already means unbounded in practice.
        """
        if n < 1:
            raise PreconditionError("n must be positive")
        lognp = math.log(n * p) if n * p > 0 else 0.0
        if lognp <= 0:
            depth = n
        else:
            depth = min(n, max(1, math.ceil(3 * math.log(n) / lognp)))
        target = max(1, math.floor(n * consts.endpoint_fraction))
        return RotationBudget(depth, target, frozenset(avoid_set))


class ClosureResult(NamedTuple):
    """Endpoint set grown from a fixed-endpoint path.

    witnesses maps each endpoint to the 1-based pivot sequence that reaches
    it from the input path; paths holds the resulting rotated paths. exit is
    "extension-found" (extension names the endpoint and its outside
    neighbor), "closure-complete", or "budget-exhausted".
    """

    endpoints: frozenset[int]
    witnesses: dict[int, tuple[int, ...]]
    exit: str
    paths: dict[int, RotationPath]
    extension: tuple[int, int] | None


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def endpoint_closure(g: Graph, p0: RotationPath, budget: RotationBudget) -> ClosureResult:
    """Breadth-first endpoint growth with p0's first vertex held fixed.

    Layer k holds endpoints needing k rotations; each endpoint is kept at
    its first (shortest) witness. Stops early when a discovered endpoint
    has a neighbor outside the path's vertex set. Pivot positions whose
    surrounding path window touches avoid_set are skipped. Path edges are
    not re-checked against g: only pivot edges must lie in g, which lets
    spliced paths carry booster edges in their spine.
    """
    pmask = _mask(p0.vertices)
    avoid = budget.avoid_set
    start = p0.endpoint
    witnesses: dict[int, tuple[int, ...]] = {start: ()}
    paths: dict[int, RotationPath] = {start: p0}

    def outside(v: int) -> int:
        return g.adj[v] & ~pmask

    def result(exit_: str, ext: tuple[int, int] | None) -> ClosureResult:
        return ClosureResult(frozenset(witnesses), witnesses, exit_, paths, ext)

    cand = outside(start)
    if cand:
        return result("extension-found", (start, (cand & -cand).bit_length() - 1))

    frontier = [start]
    depth = 0
    while frontier and (
        depth < budget.max_rotations_per_merge
        or len(witnesses) < budget.target_endpoint_count
    ):
        new_frontier: list[int] = []
        for endpoint in frontier:
            path = paths[endpoint]
            vs = path.vertices
            q = len(vs)
            if q < 3:
                continue
            tail = vs[q - 1]
            for i in range(1, q - 1):  # 1-based pivot position
                if not (g.adj[tail] >> vs[i - 1]) & 1:
                    continue
                if avoid and (
                    vs[i - 1] in avoid
                    or vs[i] in avoid
                    or (i >= 2 and vs[i - 2] in avoid)
                ):
                    continue
                new_end = vs[i]
                if new_end in witnesses:
                    continue
                rotated = rotate(path, g, i)
                witnesses[new_end] = witnesses[endpoint] + (i,)
                paths[new_end] = rotated
                cand = outside(new_end)
                if cand:
                    return result(
                        "extension-found",
                        (new_end, (cand & -cand).bit_length() - 1),
                    )
                new_frontier.append(new_end)
        frontier = new_frontier
        depth += 1
    return result("budget-exhausted" if frontier else "closure-complete", None)


def extend_path(g: Graph, p: RotationPath) -> RotationPath:
    """Append the smallest off-path neighbor of the free endpoint, if any."""
    cand = g.adj[p.endpoint] & ~_mask(p.vertices)
    if not cand:
        return p
    u = (cand & -cand).bit_length() - 1
    return RotationPath(p.vertices + (u,), p.broken, p.rotations_done)


class RoundRecord(NamedTuple):
    components_before: int
    rotations_used: int
    closing_edge: tuple[int, int]
    was_booster: bool


@dataclass(frozen=True)
class ConversionReport:
    """Outcome of one factor-to-Hamilton conversion.

    hamilton is the canonical cycle or None; hamming is the symmetric
    difference against the input factor's edges (-1 when no cycle was
    produced); rounds log one entry per net component reduction, ending
    with the cycle-closing round.
    """

    hamilton: tuple[int, ...] | None
    hamming: int
    boosters_used: int
    rounds: tuple[RoundRecord, ...]
    diagnostics: str = ""

    def __post_init__(self) -> None:
        before = [r.components_before for r in self.rounds]
        if any(a <= b for a, b in zip(before, before[1:])):
            raise PreconditionError("components_before must strictly decrease")
        if self.hamilton is not None and self.hamming < 0:
            raise PreconditionError("successful conversion needs a real distance")


def _open_cycle(cyc: tuple[int, ...], at: int) -> list[int]:
    """Cycle to path: delete the edge from `at` to its larger neighbor.

    The path starts at `at`, runs toward the smaller neighbor, and ends at
    the larger one."""
    k = len(cyc)
    idx = cyc.index(at)
    step = 1 if cyc[(idx + 1) % k] < cyc[(idx - 1) % k] else -1
    return [cyc[(idx + step * j) % k] for j in range(k)]


def convert_factor_to_hamilton(
    g: Graph,
    f: Factor,
    boosters: ExposureStream,
    budget: RotationBudget,
) -> ConversionReport:
    """Merge the factor's components into one Hamilton cycle.

    The working path absorbs other components through existing edges from
    its endpoints, opening absorbed cycles at the contact vertex. When both
    endpoints are stuck, rotations (over the base graph only) grow the
    reachable endpoint set on both sides; an endpoint with an off-path
    neighbor extends, otherwise the endpoint pairs form the closing set and
    boosters are consumed in order until one extends the path or closes it
    into a cycle. A closed non-spanning cycle goes back into the pool and
    is reopened at a vertex with an outside edge. Rounds are recorded per
    net component reduction; booster edges enter the working graph whether
    or not the consuming round used them directly.
    """
    if boosters.base != g:
        raise PreconditionError("booster stream was built for a different graph")
    if not f.is_almost_two_factor_of(g):
        raise PreconditionError("factor is not an almost 2-factor of the graph")
    n = g.n

    if f.s == 1 and not f.isolated and len(f.cycles[0]) == n:
        return ConversionReport(f.cycles[0], 0, 0, ())
    if n < 3:
        return ConversionReport(None, -1, 0, (), "no cycle exists below 3 vertices")

    work = g
    pieces: list[tuple[int, ...]] = sorted(
        list(f.cycles) + [(v,) for v in f.isolated]
    )
    piece_of: dict[int, tuple[int, ...]] = {v: c for c in pieces for v in c}
    stream = boosters.boosters
    cursor = 0
    rounds: list[RoundRecord] = []
    path: tuple[int, ...] | None = None

    def finish(vs: tuple[int, ...]) -> ConversionReport:
        cyc = canonical_cycle(vs)
        assert is_hamilton_cycle(work, cyc)
        ham = hamming_distance(f.edges(), cycle_edges(cyc))
        return ConversionReport(cyc, ham, cursor, tuple(rounds))

    def absent(msg: str) -> ConversionReport:
        return ConversionReport(None, -1, cursor, tuple(rounds), msg)

    def record(rotations: int, edge: tuple[int, int]) -> None:
        e = edge_key(*edge)
        rounds.append(
            RoundRecord(
                components_before=len(pieces) + 1,
                rotations_used=rotations,
                closing_edge=e,
                was_booster=not g.has_edge(*e),
            )
        )

    def absorb(vs: tuple[int, ...], u: int) -> tuple[int, ...]:
        """Splice u's component onto the path ending next to u."""
        target = piece_of[u]
        pieces.remove(target)
        if len(target) == 1:
            return vs + (u,)
        return vs + tuple(_open_cycle(target, u))

    def boundary_exists(pmask: int) -> bool:
        return any(work.adj[v] & ~pmask for v in bits(pmask))

    while True:
        if path is None:
            cur = min(pieces, key=min)
            curmask = _mask(cur)
            if len(cur) == 1:
                path = cur
            else:
                openers = [v for v in sorted(cur) if work.adj[v] & ~curmask]
                path = tuple(_open_cycle(cur, openers[0] if openers else cur[0]))
            pieces.remove(cur)

        if len(path) == n:
            # spanning: only closing remains
            if work.has_edge(path[0], path[-1]):
                record(0, (path[0], path[-1]))
                return finish(path)
            states = _pair_states(g, work, path, budget)
            if states.closable:
                vs, rotations, edge = states.closable[0]
                record(rotations, edge)
                return finish(vs)
            while cursor < len(stream):
                e = stream[cursor]
                cursor += 1
                work = work.with_edges([e])
                hit = states.pairs.get(frozenset(e))
                if hit is not None:
                    vs, rotations = hit
                    record(rotations, e)
                    return finish(vs)
            return absent(
                "spanning path could not be closed: "
                f"{len(states.pairs)} closing pairs, boosters exhausted"
            )

        pmask = _mask(path)
        # direct extension: tail first, then head after a flip
        ext = _direct_extension(work, path, pmask)
        if ext is not None:
            vs, u = ext
            record(0, (vs[-1], u))
            path = absorb(vs, u)
            continue

        states = _pair_states(g, work, path, budget)
        if states.extension is not None:
            vs, rotations, u = states.extension
            record(rotations, (vs[-1], u))
            path = absorb(vs, u)
            continue

        if states.closable and boundary_exists(pmask):
            # close now, reopen at a boundary vertex next round
            vs, _, _ = states.closable[0]
            pieces.append(canonical_cycle(vs))
            pieces.sort()
            piece_of = {v: c for c in pieces for v in c}
            path = None
            continue

        progressed = False
        while cursor < len(stream):
            a, b = stream[cursor]
            cursor += 1
            work = work.with_edges([(a, b)])
            ext = _booster_extension(states, pmask, a, b)
            if ext is not None:
                vs, rotations, u = ext
                record(rotations, (vs[-1], u))
                path = absorb(vs, u)
                progressed = True
                break
            hit = states.pairs.get(frozenset((a, b)))
            if hit is not None:
                vs, rotations = hit
                pieces.append(canonical_cycle(vs))
                pieces.sort()
                piece_of = {v: c for c in pieces for v in c}
                path = None
                progressed = True
                break
            # an inert booster may have just created the path's first
            # outside edge, making a deferred close-and-reopen productive
            if states.closable and boundary_exists(pmask):
                vs, rotations, edge = states.closable[0]
                pieces.append(canonical_cycle(vs))
                pieces.sort()
                piece_of = {v: c for c in pieces for v in c}
                path = None
                progressed = True
                break
        if progressed:
            continue
        covered = tuple(sorted(bits(pmask)))
        return absent(
            f"stuck component {covered}: no reachable endpoint extends and "
            f"boosters are exhausted; unreached components: {tuple(pieces)}"
        )


class _PairStates(NamedTuple):
    extension: tuple[tuple[int, ...], int, int] | None  # (path, rotations, outside)
    closable: list[tuple[tuple[int, ...], int, tuple[int, int]]]
    pairs: dict[frozenset, tuple[tuple[int, ...], int]]
    endpoint_states: list[tuple[tuple[int, ...], int]]


def _direct_extension(work: Graph, path: tuple[int, ...], pmask: int):
    cand = work.adj[path[-1]] & ~pmask
    if cand:
        return path, (cand & -cand).bit_length() - 1
    cand = work.adj[path[0]] & ~pmask
    if cand:
        return tuple(reversed(path)), (cand & -cand).bit_length() - 1
    return None


def _pair_states(
    base: Graph, work: Graph, path: tuple[int, ...], budget: RotationBudget
) -> _PairStates:
    """All endpoint states reachable by the two-sided rotation dance.

    Rotations run over the base graph; extension and closability are judged
    against the working graph (base plus consumed boosters). Returns the
    first extension found (in deterministic scan order), the pairs that are
    already working edges, and the closing map pair -> (path, rotations).
    """
    pmask = _mask(path)
    pairs: dict[frozenset, tuple[tuple[int, ...], int]] = {}
    closable: list[tuple[tuple[int, ...], int, tuple[int, int]]] = []
    endpoint_states: list[tuple[tuple[int, ...], int]] = []

    first = endpoint_closure(base, RotationPath(path), budget)
    for z, zp in first.paths.items():
        rot_z = len(first.witnesses[z])
        vs_z = zp.vertices
        endpoint_states.append((vs_z, rot_z))
        cand = work.adj[z] & ~pmask
        if cand:
            return _PairStates(
                (vs_z, rot_z, (cand & -cand).bit_length() - 1),
                closable,
                pairs,
                endpoint_states,
            )

    for z, zp in first.paths.items():
        rot_z = len(first.witnesses[z])
        anchored = RotationPath(tuple(reversed(zp.vertices)))
        second = endpoint_closure(base, anchored, budget)
        for a, ap in second.paths.items():
            rot = rot_z + len(second.witnesses[a])
            vs = ap.vertices
            if len(vs) >= 2:
                endpoint_states.append((vs, rot))
            cand = work.adj[a] & ~pmask
            if cand:
                return _PairStates(
                    (vs, rot, (cand & -cand).bit_length() - 1),
                    closable,
                    pairs,
                    endpoint_states,
                )
            if a == z or len(vs) < 3:
                continue
            key = frozenset((z, a))
            if work.has_edge(z, a):
                closable.append((vs, rot, (z, a)))
            elif key not in pairs:
                pairs[key] = (vs, rot)
    return _PairStates(None, closable, pairs, endpoint_states)


def _booster_extension(states: _PairStates, pmask: int, a: int, b: int):
    """Match a consumed booster against the recorded endpoint states."""
    for vs, rot in states.endpoint_states:
        end = vs[-1]
        if end == a and not pmask >> b & 1:
            return vs, rot, b
        if end == b and not pmask >> a & 1:
            return vs, rot, a
    return None


def find_hamilton_rotation(
    g: Graph, budget: RotationBudget, seed: int = 0
) -> tuple[int, ...] | None:
    """Hamilton cycle by rotation-extension, with an exact fallback.

    Tries seeded start vertices with greedy extension plus the two-sided
    closure dance; if every start stalls, falls back to a pruned exhaustive
    search, so a None answer really means no Hamilton cycle exists.
    """
    n = g.n
    if n < 3:
        return None
    summary = degrees(g)
    if summary.minimum < 2 or not g.is_connected():
        return None
    order = list(range(n))
    Rng(derive_seed(seed, 0)).shuffle(order)
    for start in order:
        found = _rotation_attempt(g, start, budget)
        if found is not None:
            assert is_hamilton_cycle(g, found)
            return found
    return _hamilton_backtrack(g)


def _rotation_attempt(
    g: Graph, start: int, budget: RotationBudget
) -> tuple[int, ...] | None:
    vs: tuple[int, ...] = (start,)
    n = g.n
    for _ in range(4 * n + 8):  # each step extends or gives up; bound is slack
        grown = extend_path(g, RotationPath(vs))
        if grown.vertices != vs:
            vs = grown.vertices
            continue
        flipped = extend_path(g, RotationPath(tuple(reversed(vs))))
        if len(flipped.vertices) > len(vs):
            vs = flipped.vertices
            continue
        if len(vs) == n:
            if g.has_edge(vs[0], vs[-1]):
                return canonical_cycle(vs)
            states = _pair_states(g, g, vs, budget)
            if states.closable:
                return canonical_cycle(states.closable[0][0])
            return None
        states = _pair_states(g, g, vs, budget)
        if states.extension is None:
            return None
        evs, _, u = states.extension
        vs = evs + (u,)
    return None


def _hamilton_backtrack(g: Graph) -> tuple[int, ...] | None:
    """Exhaustive cycle search anchored at vertex 0, with pruning.

    Prunes when the unvisited region is disconnected from the working
    endpoint or some vertex can no longer reach degree 2 among the vertices
    still available to it."""
    n = g.n
    adj = g.adj
    full = (1 << n) - 1
    path = [0]
    best: tuple[int, ...] | None = None

    def feasible(cur: int, visited: int) -> bool:
        rem = full & ~visited
        if not adj[0] & (rem | (1 << cur)):
            return False
        seen = 1 << cur
        frontier = adj[cur] & rem
        seen |= frontier
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= adj[v]
            frontier = nxt & rem & ~seen
            seen |= frontier
        if rem & ~seen:
            return False
        allowed = rem | (1 << cur) | 1
        for v in bits(rem):
            if (adj[v] & allowed).bit_count() < 2:
                return False
        return True

    def dfs(cur: int, visited: int) -> None:
        nonlocal best
        if best is not None:
            return
        if visited == full:
            if adj[cur] & 1:
                best = tuple(path)
            return
        if not feasible(cur, visited):
            return
        for u in bits(adj[cur] & ~visited):
            path.append(u)
            dfs(u, visited | 1 << u)
            path.pop()
            if best is not None:
                return

    dfs(0, 1)
    return canonical_cycle(best) if best is not None else None


# --- factor text format --------------------------------------------------------
# One cycle per line as space-separated vertex ids; isolated vertices on
# lines prefixed "i". Blank lines and # comments ignored.


def parse_factor_lines(text: str, n: int) -> Factor:
    cycles: list[tuple[int, ...]] = []
    isolated: list[int] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "i":
                if len(parts) < 2:
                    raise FormatError(f"line {lineno}: isolated line names no vertex")
                isolated.extend(int(tok) for tok in parts[1:])
            else:
                cycles.append(tuple(int(tok) for tok in parts))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: non-integer vertex in {raw!r}") from exc
    try:
        return Factor.from_components(n, cycles, isolated)
    except (PreconditionError, ValueError) as exc:
        raise FormatError(f"not a valid factor on {n} vertices: {exc}") from exc


def format_factor_lines(f: Factor) -> str:
    lines = [" ".join(str(v) for v in cyc) for cyc in f.cycles]
    if f.isolated:
        lines.append("i " + " ".join(str(v) for v in sorted(f.isolated)))
    return "\n".join(lines) + "\n" if lines else ""
