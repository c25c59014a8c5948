"""Compiled all-sources reachability sweep.

Runs a breadth-first search from every node of a directed graph at once,
64 sources per pass, with one u64 bit-lane per source. Per-step per-source
activation counts are accumulated through carry-save "vertical counters"
(one u64 per bit position), so no per-activation per-lane loop is needed.

For each source the sweep reports: how many nodes it ever reaches, the
last depth at which anything new activated (saturation depth), and the
first depth at which the whole graph was covered (-1 if never).
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["multi_source_reach"]


@njit(cache=True)
def _reach_kernel(indptr, indices, n):  # pragma: no cover - exercised via wrapper
    reached = np.zeros(n, np.int64)
    sat = np.zeros(n, np.int64)
    full = np.full(n, -1, np.int64)
    if n == 0:
        return reached, sat, full

    one = np.uint64(1)
    bits = np.empty(64, np.uint64)
    for b in range(64):
        bits[b] = one << np.uint64(b)

    # Enough counter levels to hold a per-step count of up to n activations.
    levels = 1
    while (np.int64(1) << levels) <= n:
        levels += 1

    seen = np.zeros(n, np.uint64)
    cur = np.zeros(n, np.uint64)
    nxt = np.zeros(n, np.uint64)
    wl = np.empty(n, np.int64)
    wl2 = np.empty(n, np.int64)
    touched = np.empty(n, np.int64)
    cnt = np.empty(64, np.uint64)
    counts = np.empty(64, np.int64)

    for base in range(0, n, 64):
        width = min(64, n - base)
        for b in range(width):
            src = base + b
            seen[src] = bits[b]
            cur[src] = bits[b]
            wl[b] = src
            counts[b] = 1
            reached[base + b] = 1
            if n == 1:
                full[base + b] = 0
        wl_n = width
        depth = 0

        while wl_n > 0:
            # Scatter frontier bits along out-edges.
            t_n = 0
            for k in range(wl_n):
                v = wl[k]
                fb = cur[v]
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    nb = fb & ~seen[w]
                    if nb != np.uint64(0):
                        if nxt[w] == np.uint64(0):
                            touched[t_n] = w
                            t_n += 1
                        nxt[w] |= nb
            depth += 1
            for k in range(wl_n):
                cur[wl[k]] = np.uint64(0)

            # Commit new activations; vertical counters count them per lane.
            for k in range(levels):
                cnt[k] = np.uint64(0)
            wl2_n = 0
            for k in range(t_n):
                w = touched[k]
                nb = nxt[w]
                nxt[w] = np.uint64(0)
                seen[w] |= nb
                cur[w] = nb
                wl2[wl2_n] = w
                wl2_n += 1
                carry = nb
                kk = 0
                while carry != np.uint64(0) and kk < levels:
                    tmp = cnt[kk] & carry
                    cnt[kk] = cnt[kk] ^ carry
                    carry = tmp
                    kk += 1

            for b in range(width):
                c = 0
                for kk in range(levels):
                    if (cnt[kk] & bits[b]) != np.uint64(0):
                        c += 1 << kk
                if c > 0:
                    src = base + b
                    counts[b] += c
                    reached[src] += c
                    sat[src] = depth
                    if counts[b] == n and full[src] < 0:
                        full[src] = depth

            tmp_wl = wl
            wl = wl2
            wl2 = tmp_wl
            wl_n = wl2_n

        # Reset per-batch state for the nodes this batch touched.
        for v in range(n):
            seen[v] = np.uint64(0)
            cur[v] = np.uint64(0)

    return reached, sat, full


def multi_source_reach(
    indptr: np.ndarray, indices: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-source reach summary over the out-adjacency CSR (indptr, indices).

    Returns (reached, saturation_depth, full_coverage_depth) arrays indexed
    by source node; full_coverage_depth is -1 for sources that never reach
    the whole graph.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int32)
    if len(indptr) != n + 1 or indptr[-1] != len(indices):
        raise ValueError("inconsistent CSR arrays")
    if len(indices) and (indices.min() < 0 or indices.max() >= n):
        raise ValueError("CSR column index out of range")
    return _reach_kernel(indptr, indices, np.int64(n))
