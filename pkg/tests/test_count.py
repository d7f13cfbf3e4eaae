import math

import pytest

from hamlab.core import CapacityError, Digraph, Graph, PreconditionError
from hamlab.count import (
    count_hamilton_cycles,
    count_hamilton_cycles_bruteforce,
    count_one_factors,
    count_perfect_matchings,
    count_two_factors,
    derived_constants,
    double_count_lower_bound,
    expected_hamilton_cycles,
    expected_two_factor_bound,
    iter_two_factors,
    permanent,
    permanent_naive,
    regular_matchings_lower_bound,
)
from hamlab.generate import Rng, orient_randomly, sample_gnp
from hamlab.structure import bipartite_double_cover


PETERSEN = Graph.from_edges(10, [
    (0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
    (5, 7), (7, 9), (6, 9), (6, 8), (5, 8),
])


def test_complete_graph_counts():
    for n in range(3, 13):
        assert count_hamilton_cycles(Graph.complete(n)) == math.factorial(n - 1) // 2


def test_small_and_degenerate_counts():
    assert count_hamilton_cycles(Graph.from_edges(2, [(0, 1)])) == 0
    assert count_hamilton_cycles(Graph.from_edges(0, [])) == 0
    cn = Graph.from_edges(7, [(i, (i + 1) % 7) for i in range(7)])
    assert count_hamilton_cycles(cn) == 1
    assert count_hamilton_cycles(PETERSEN) == 0


def test_dp_matches_bruteforce_randomized():
    rng = Rng(17)
    for trial in range(120):
        n = 4 + rng.below(5)  # 4..8
        p = (2 + rng.below(7)) / 10
        g = sample_gnp(n, p, seed=derive(trial))
        assert count_hamilton_cycles(g) == count_hamilton_cycles_bruteforce(g)


def derive(i):
    return 1_000_003 * i + 7


def test_hamilton_cap_enforced():
    with pytest.raises(CapacityError):
        count_hamilton_cycles(Graph.complete(8), cap=7)


def test_crt_path_matches_int64_path():
    # force the modular branch on a graph small enough for the direct one
    g = sample_gnp(12, 0.6, seed=3)
    from hamlab import count as count_mod
    import numpy as np
    from hamlab import _kernels
    adj = np.array(g.adj, dtype=np.int64)
    direct = int(_kernels.ham_total(adj, g.n))
    r1 = int(_kernels.ham_total_mod(adj, g.n, count_mod._CRT_M1))
    r2 = int(_kernels.ham_total_mod(adj, g.n, count_mod._CRT_M2))
    inv = pow(count_mod._CRT_M1, -1, count_mod._CRT_M2)
    recon = r1 + count_mod._CRT_M1 * (((r2 - r1) * inv) % count_mod._CRT_M2)
    assert recon == direct


def test_permanent_reference_matrices():
    for n in range(1, 11):
        ones = [[1] * n for _ in range(n)]
        assert permanent(ones) == math.factorial(n)
    for n in range(1, 8):
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        assert permanent(eye) == 1
    assert permanent([[0, 1], [1, 0]]) == 1
    assert permanent([]) == 1  # empty product convention


def test_permanent_matches_naive():
    rng = Rng(23)
    for trial in range(100):
        n = 1 + rng.below(7)
        mat = [[rng.below(2) for _ in range(n)] for _ in range(n)]
        assert permanent(mat) == permanent_naive(mat)


def test_permanent_rejects_nonsquare():
    with pytest.raises(PreconditionError):
        permanent([[1, 0]])


def test_one_factors_total_is_permanent():
    rng = Rng(29)
    for trial in range(60):
        n = 2 + rng.below(6)
        g = sample_gnp(n, 0.5, seed=derive(trial) + 1)
        d = orient_randomly(g, seed=trial)
        d = Digraph.from_arcs(n, sorted(set(d.arcs()) | {(v, u) for u, v in d.arcs()}))
        mat = [[(d.out_adj[u] >> v) & 1 for v in range(n)] for u in range(n)]
        census = count_one_factors(d, 0)
        assert census.total() == permanent(mat)


def test_one_factors_empty_cover_key():
    d = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    census = count_one_factors(d, allow_missing=3)
    assert census[0] == 1  # the empty cover
    assert census[1] == 1  # the 3-cycle


def test_two_factors_single_cycle_is_hamilton_count():
    rng = Rng(31)
    for trial in range(60):
        n = 5 + rng.below(6)  # 5..10
        g = sample_gnp(n, 0.5, seed=derive(trial) + 2)
        census = count_two_factors(g, 0)
        assert census[1] == count_hamilton_cycles(g)


def test_two_factor_census_k6_frozen():
    census = count_two_factors(Graph.complete(6), 0)
    assert census.by_cycles == {1: 60, 2: 10}
    assert census.total() == 70


def test_two_factors_max_cycles_prunes():
    census = count_two_factors(Graph.complete(6), 0, max_cycles=1)
    assert census.by_cycles == {1: 60}


def test_iter_two_factors_matches_census():
    g = sample_gnp(8, 0.6, seed=12)
    census = count_two_factors(g, allow_isolated=1)
    factors = list(iter_two_factors(g, allow_isolated=1))
    assert len(factors) == census.total()
    assert len(set(factors)) == len(factors)
    by_s = {}
    for f in factors:
        by_s[f.s] = by_s.get(f.s, 0) + 1
        assert f.is_almost_two_factor_of(g, budget=1)
    assert by_s == {s: c for s, c in census.by_cycles.items() if c}


def test_perfect_matchings_reference():
    assert count_perfect_matchings(Graph.complete(4)) == 3
    assert count_perfect_matchings(Graph.complete(6)) == 15
    assert count_perfect_matchings(Graph.complete(5)) == 0
    assert count_perfect_matchings(Graph.from_edges(2, [(0, 1)])) == 1
    assert count_perfect_matchings(Graph.from_edges(2, [])) == 0
    assert count_perfect_matchings(Graph.from_edges(0, [])) == 1
    assert count_perfect_matchings(PETERSEN) == 6


def test_double_cover_matchings_equal_permanent():
    rng = Rng(37)
    for trial in range(40):
        n = 2 + rng.below(6)
        g = sample_gnp(n, 0.6, seed=derive(trial) + 3)
        d = orient_randomly(g, seed=trial + 50)
        mat = [[(d.out_adj[u] >> v) & 1 for v in range(n)] for u in range(n)]
        cover = bipartite_double_cover(d)
        assert count_perfect_matchings(cover) == permanent(mat)


def test_expected_hamilton_values():
    v = expected_hamilton_cycles(10, 0.5)
    assert v.value == pytest.approx(177.1875, abs=1e-9)
    assert expected_hamilton_cycles(5, 1.0).value == 12.0
    assert expected_hamilton_cycles(5, 0.0).value == 0.0
    assert expected_hamilton_cycles(200, 0.5).log == pytest.approx(
        math.lgamma(200) + 200 * math.log(0.5) - math.log(2)
    )


def test_expected_two_factor_bound_monotone_in_s():
    a = expected_two_factor_bound(30, 0.5, 1)
    b = expected_two_factor_bound(30, 0.5, 2)
    assert a.value > 0 and b.value > 0
    assert b.value / a.value == pytest.approx(math.log(30) / 2, rel=1e-9)


def test_regular_matchings_lower_bound():
    mb = regular_matchings_lower_bound(3, 3)
    assert mb.value == pytest.approx(27 * 6 / 27)
    assert mb.weak_value < mb.value
    assert regular_matchings_lower_bound(0, 4).value == 0.0


def test_derived_constants_shape():
    dc = derived_constants(100, 0.5)
    assert dc.s_star == pytest.approx(17.57, abs=0.01)
    assert dc.t0_degenerate  # np/3000 << 1 at this scale
    assert dc.d < 0  # desk-scale degeneracy, documented
    big = derived_constants(10_000, 0.9)
    assert big.r == pytest.approx(4500.0)
    assert big.t0 is not None and big.t0 >= 2
    with pytest.raises(PreconditionError):
        derived_constants(10, 0.5)


def test_double_count_lower_bound_values():
    lv = double_count_lower_bound(100, 10, 1, 4)
    assert lv.value == pytest.approx(100 / (10 * 25))
    assert double_count_lower_bound(0, 10, 3, 4).value == 0.0
    assert double_count_lower_bound(7, 10, 0, 4).value == 7.0
    with pytest.raises(PreconditionError):
        double_count_lower_bound(5, 10, 11, 4)
