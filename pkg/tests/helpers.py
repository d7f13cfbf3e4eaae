"""Independent brute-force oracles for the structural checkers.

Everything here is deliberately written with plain set/itertools code,
separate from the package's bitmask implementations, so tests compare two
code paths that share nothing but the definitions.
"""

import itertools
import math


def graph_degree(g, v):
    return sum(1 for u in range(g.n) if u != v and g.has_edge(u, v))


def brute_d_set(g, p, consts):
    threshold = g.n * p / consts.low_degree_divisor
    return {v for v in range(g.n) if graph_degree(g, v) < threshold}


def brute_short_path_exists(g, d_set, limit):
    """Any simple path of length 1..limit with both endpoints in d_set,
    or a cycle of 3..limit edges through a d_set vertex."""
    if not d_set:
        return False
    n = g.n
    for length in range(1, limit + 1):
        for verts in itertools.product(range(n), repeat=length + 1):
            if verts[0] not in d_set or verts[-1] not in d_set:
                continue
            if any(not g.has_edge(a, b) for a, b in zip(verts, verts[1:])):
                continue
            if verts[0] == verts[-1]:
                if length >= 3 and len(set(verts[:-1])) == length:
                    return True
            elif len(set(verts)) == length + 1:
                return True
    return False


def brute_expansion_ok(g, p, d_set, consts):
    n = g.n
    need = n * p / consts.expansion_divisor
    rest = [v for v in range(n) if v not in d_set]
    s_max = min(math.floor(1 / p), len(rest))
    for size in range(1, s_max + 1):
        for combo in itertools.combinations(rest, size):
            inside = set(combo)
            nb = set()
            for v in combo:
                nb |= {u for u in range(n) if g.has_edge(u, v)}
            if len(nb - inside) < need * size:
                return False
    return True


def brute_expander_verdict(g, p, consts):
    """(is_expander, d_set) evaluated straight from the three-part definition."""
    n = g.n
    d_set = brute_d_set(g, p, consts)
    if len(d_set) > n ** consts.expander_size_exponent:
        return False, d_set
    limit = math.floor(
        consts.short_path_factor * math.log(n) / math.log(math.log(n))
    )
    if brute_short_path_exists(g, d_set, limit):
        return False, d_set
    return brute_expansion_ok(g, p, d_set, consts), d_set


def brute_edge_violations(d, r, consts):
    """All (A, B) subset pairs with too many arcs, as sorted vertex tuples."""
    n = d.n
    cap = math.floor(consts.set_size_cap * n)
    out = set()
    verts = range(n)
    for asize in range(1, cap + 1):
        for a in itertools.combinations(verts, asize):
            for bsize in range(1, cap + 1):
                for b in itertools.combinations(verts, bsize):
                    arcs = sum(
                        1 for u in a for v in b if (d.out_adj[u] >> v) & 1
                    )
                    if arcs > consts.edge_density_coeff * r * math.sqrt(asize * bsize):
                        out.add((a, b))
    return out


def brute_ore_ryser(b, d_reg):
    """The subset condition d|Y'| <= sum_x min(d, e(x, Y')) for every Y'."""
    if d_reg == 0:
        return True, None
    for size in range(1, b.ny + 1):
        for yset in itertools.combinations(range(b.ny), size):
            supply = 0
            for x in range(b.nx):
                e_x = sum(1 for y in yset if b.has_edge(x, y))
                supply += min(d_reg, e_x)
            if d_reg * len(yset) > supply:
                return False, yset
    return True, None
