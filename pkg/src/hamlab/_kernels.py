"""Numba kernels for the 2^n dynamic programs.

Graphs arrive as int64 bitmask arrays (one mask per vertex), so every kernel
is capped well below 63 vertices by its caller. The Hamilton kernels count
directed closed traversals anchored at vertex 0 (twice the cycle count).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def ham_total(adj, n):
    """Directed Hamilton traversals from/to vertex 0. Exact in int64 for
    n <= 21 ((n-1)! < 2^63); callers enforce that."""
    full = (1 << (n - 1)) - 1
    dp = np.zeros((full + 1) * (n - 1), dtype=np.int64)
    a0 = adj[0]
    for v in range(1, n):
        if (a0 >> v) & 1:
            dp[(1 << (v - 1)) * (n - 1) + (v - 1)] = 1
    for mask in range(1, full + 1):
        base = mask * (n - 1)
        for vb in range(n - 1):
            cnt = dp[base + vb]
            if cnt == 0:
                continue
            free = (adj[vb + 1] >> 1) & full & ~mask
            while free:
                low = free & (-free)
                wb = 0
                t = low
                while t > 1:
                    t >>= 1
                    wb += 1
                dp[(mask | low) * (n - 1) + wb] += cnt
                free ^= low
    total = np.int64(0)
    base = full * (n - 1)
    for vb in range(n - 1):
        if (a0 >> (vb + 1)) & 1:
            total += dp[base + vb]
    return total


@njit(cache=True)
def ham_total_mod(adj, n, mod):
    """ham_total modulo mod (mod < 2^62, so sums stay inside int64)."""
    full = (1 << (n - 1)) - 1
    dp = np.zeros((full + 1) * (n - 1), dtype=np.int64)
    a0 = adj[0]
    for v in range(1, n):
        if (a0 >> v) & 1:
            dp[(1 << (v - 1)) * (n - 1) + (v - 1)] = 1
    for mask in range(1, full + 1):
        base = mask * (n - 1)
        for vb in range(n - 1):
            cnt = dp[base + vb]
            if cnt == 0:
                continue
            free = (adj[vb + 1] >> 1) & full & ~mask
            while free:
                low = free & (-free)
                wb = 0
                t = low
                while t > 1:
                    t >>= 1
                    wb += 1
                idx = (mask | low) * (n - 1) + wb
                dp[idx] = (dp[idx] + cnt) % mod
                free ^= low
    total = np.int64(0)
    base = full * (n - 1)
    for vb in range(n - 1):
        if (a0 >> (vb + 1)) & 1:
            total = (total + dp[base + vb]) % mod
    return total


@njit(cache=True)
def perfect_matchings(adj, n):
    """Perfect matchings by matching the lowest vertex of each submask.
    Counts fit int64 through n = 24 ((n-1)!! bound)."""
    size = 1 << n
    dp = np.zeros(size, dtype=np.int64)
    dp[0] = 1
    for mask in range(1, size):
        low = mask & (-mask)
        v = 0
        t = low
        while t > 1:
            t >>= 1
            v += 1
        rest = mask ^ low
        cand = adj[v] & rest
        acc = np.int64(0)
        while cand:
            lu = cand & (-cand)
            acc += dp[rest ^ lu]
            cand ^= lu
        dp[mask] = acc
    return dp[size - 1]


@njit(cache=True)
def edge_density_violations(in_adj, n, size_cap, thresholds, max_out):
    """All subset pairs (A, B) of sizes <= size_cap whose directed edge count
    e(A, B) exceeds thresholds[|A|, |B|]. Incremental subset sums keep the
    whole sweep at O(4^n). Records at most max_out pairs; the full violation
    count is returned regardless."""
    size = 1 << n
    pop = np.zeros(size, dtype=np.int8)
    lowidx = np.zeros(size, dtype=np.int8)
    for i in range(1, size):
        pop[i] = pop[i >> 1] + (i & 1)
    for b in range(n):
        lowidx[1 << b] = b
    w = np.zeros(n, dtype=np.int64)
    e = np.zeros(size, dtype=np.int64)
    out_a = np.empty(max_out, dtype=np.int64)
    out_b = np.empty(max_out, dtype=np.int64)
    cnt = 0
    for a_mask in range(1, size):
        if pop[a_mask] > size_cap:
            continue
        for b in range(n):
            w[b] = pop[in_adj[b] & a_mask]
        for b_mask in range(1, size):
            low = b_mask & (-b_mask)
            val = e[b_mask ^ low] + w[lowidx[low]]
            e[b_mask] = val
            if pop[b_mask] <= size_cap and val > thresholds[pop[a_mask], pop[b_mask]]:
                if cnt < max_out:
                    out_a[cnt] = a_mask
                    out_b[cnt] = b_mask
                cnt += 1
    return cnt, out_a, out_b
