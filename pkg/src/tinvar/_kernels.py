"""Numba kernels for the hot enumeration loops.

All kernels are nogil so a thread pool gives real parallelism; tallies are
returned as int64 and aggregated in Python big integers.  Masks are int64
bitmasks, which caps slice sizes (and Latin cube symbol counts) at 63 --
far beyond anything enumerable anyway.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# Signed arrangement counting for basis-form classes.
#
# Boxes are processed in the design's global (lexicographic) order.  Placing
# a summand with basis index b into a slice whose mask already holds larger
# indices adds that many inversions; the arrangement sign is the parity of
# all inversions over all slices of all axes.


@njit(cache=True, nogil=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def signed_count(slice_id, slice_size, idx, counts0, prefix, budget):
    """Count distinct nonzero arrangements of a multiset of summands.

    slice_id   : (k, d) global slice id of each box position per axis
    slice_size : (S,)   size of each global slice
    idx        : (T, k) 0-based basis index of each summand type per axis
    counts0    : (T,)   multiplicities (consumed copies are restored on exit)
    prefix     : (P,)   forced summand types at the first P positions
    budget     : int64  max placed nodes, or -1 for unlimited

    Returns (positives, negatives, nodes, done); done is 0 if the budget ran
    out.  Positives/negatives count *distinct* arrangements.
    """
    k, d = slice_id.shape
    T = idx.shape[0]
    S = slice_size.shape[0]
    counts = counts0.copy()
    masks = np.zeros(S, dtype=np.int64)
    choice = np.full(d, -1, dtype=np.int64)
    pdelta = np.zeros(d, dtype=np.int64)
    pos = np.int64(0)
    neg = np.int64(0)
    nodes = np.int64(0)
    parity = 0

    P = prefix.shape[0]
    for p in range(P):
        t = prefix[p]
        if counts[t] == 0:
            return pos, neg, nodes, np.int64(1)
        delta = 0
        ok = True
        for a in range(k):
            s = slice_id[a, p]
            b = idx[t, a]
            if b >= slice_size[s] or (masks[s] >> b) & 1:
                ok = False
                break
            delta += _popcount(masks[s] >> (b + 1))
        if not ok:
            return pos, neg, nodes, np.int64(1)
        for a in range(k):
            s = slice_id[a, p]
            masks[s] |= np.int64(1) << idx[t, a]
        counts[t] -= 1
        choice[p] = t
        parity ^= delta & 1

    p = P
    t_start = 0
    while True:
        if p == d:
            if parity == 0:
                pos += 1
            else:
                neg += 1
            p -= 1
            if p < P:
                break
            t = choice[p]
            for a in range(k):
                masks[slice_id[a, p]] &= ~(np.int64(1) << idx[t, a])
            counts[t] += 1
            parity ^= pdelta[p]
            t_start = t + 1
            continue
        placed = False
        for t in range(t_start, T):
            if counts[t] == 0:
                continue
            delta = 0
            ok = True
            for a in range(k):
                s = slice_id[a, p]
                b = idx[t, a]
                if b >= slice_size[s] or (masks[s] >> b) & 1:
                    ok = False
                    break
                delta += _popcount(masks[s] >> (b + 1))
            if not ok:
                continue
            for a in range(k):
                masks[slice_id[a, p]] |= np.int64(1) << idx[t, a]
            counts[t] -= 1
            choice[p] = t
            pdelta[p] = delta & 1
            parity ^= delta & 1
            nodes += 1
            if budget >= 0 and nodes > budget:
                return pos, neg, nodes, np.int64(0)
            placed = True
            break
        if placed:
            p += 1
            t_start = 0
        else:
            p -= 1
            if p < P:
                break
            t = choice[p]
            for a in range(k):
                masks[slice_id[a, p]] &= ~(np.int64(1) << idx[t, a])
            counts[t] += 1
            parity ^= pdelta[p]
            t_start = t + 1
    return pos, neg, nodes, np.int64(1)


@njit(cache=True, nogil=True)
def has_arrangement(slice_id, slice_size, idx, counts0, budget):
    """Whether any arrangement of the multiset has nonzero val."""
    k, d = slice_id.shape
    T = idx.shape[0]
    S = slice_size.shape[0]
    counts = counts0.copy()
    masks = np.zeros(S, dtype=np.int64)
    choice = np.full(d, -1, dtype=np.int64)
    nodes = np.int64(0)
    p = 0
    t_start = 0
    while True:
        if p == d:
            return np.int64(1), np.int64(1)
        placed = False
        for t in range(t_start, T):
            if counts[t] == 0:
                continue
            ok = True
            for a in range(k):
                s = slice_id[a, p]
                b = idx[t, a]
                if b >= slice_size[s] or (masks[s] >> b) & 1:
                    ok = False
                    break
            if not ok:
                continue
            for a in range(k):
                masks[slice_id[a, p]] |= np.int64(1) << idx[t, a]
            counts[t] -= 1
            choice[p] = t
            nodes += 1
            if budget >= 0 and nodes > budget:
                return np.int64(0), np.int64(0)
            placed = True
            break
        if placed:
            p += 1
            t_start = 0
        else:
            p -= 1
            if p < 0:
                return np.int64(0), np.int64(1)
            t = choice[p]
            for a in range(k):
                masks[slice_id[a, p]] &= ~(np.int64(1) << idx[t, a])
            counts[t] += 1
            t_start = t + 1


# ---------------------------------------------------------------------------
# Latin cube census.  Cells of B(n,n,n) in lexicographic order; symbols are
# 0-based in [n^2).  Slice signs accumulate incrementally exactly as in the
# design engine; the symbol sign tracks, per symbol, the inversion parity of
# its y- and z-coordinate sequences read along increasing x.


@njit(cache=True, nogil=True)
def latin_census(n, prefix, fix_diag, budget):
    """Enumerate order-n Latin cubes.

    prefix   : forced 0-based symbols for the first cells (lex order); pass
               an empty array for a full census.
    fix_diag : if nonzero, cells (i,i,i) are forced to symbol n^2-1
               (unipotent cubes).
    Returns (total, even, odd, sym_even, sym_odd, nodes, done).
    """
    nn = n * n
    d = n * n * n
    ci = np.empty(d, dtype=np.int64)
    cj = np.empty(d, dtype=np.int64)
    ck = np.empty(d, dtype=np.int64)
    c = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ci[c] = i
                cj[c] = j
                ck[c] = k
                c += 1
    xmask = np.zeros(n, dtype=np.int64)
    ymask = np.zeros(n, dtype=np.int64)
    zmask = np.zeros(n, dtype=np.int64)
    sjm = np.zeros(nn, dtype=np.int64)  # per-symbol mask of j coords seen
    skm = np.zeros(nn, dtype=np.int64)
    choice = np.full(d, -1, dtype=np.int64)
    pd = np.zeros(d, dtype=np.int64)  # slice-sign parity delta per cell
    sd = np.zeros(d, dtype=np.int64)  # symbol-sign parity delta per cell
    forced = np.full(d, -1, dtype=np.int64)
    for p in range(prefix.shape[0]):
        forced[p] = prefix[p]
    if fix_diag:
        for i in range(n):
            cell = i * nn + i * n + i
            if forced[cell] >= 0 and forced[cell] != nn - 1:
                return (
                    np.int64(0), np.int64(0), np.int64(0),
                    np.int64(0), np.int64(0), np.int64(0), np.int64(1),
                )
            forced[cell] = nn - 1

    total = np.int64(0)
    even = np.int64(0)
    odd = np.int64(0)
    sym_even = np.int64(0)
    sym_odd = np.int64(0)
    nodes = np.int64(0)
    parity = 0
    sparity = 0

    p = 0
    s_start = 0
    while True:
        if p == d:
            total += 1
            if parity == 0:
                even += 1
            else:
                odd += 1
            if sparity == 0:
                sym_even += 1
            else:
                sym_odd += 1
            p -= 1
            while p >= 0:
                s = choice[p]
                i, j, k = ci[p], cj[p], ck[p]
                bit = np.int64(1) << s
                xmask[i] &= ~bit
                ymask[j] &= ~bit
                zmask[k] &= ~bit
                sjm[s] &= ~(np.int64(1) << j)
                skm[s] &= ~(np.int64(1) << k)
                parity ^= pd[p]
                sparity ^= sd[p]
                if forced[p] >= 0:
                    p -= 1
                    continue
                s_start = s + 1
                break
            if p < 0:
                break
            continue
        i, j, k = ci[p], cj[p], ck[p]
        placed = False
        if forced[p] >= 0:
            lo = forced[p]
            hi = forced[p] + 1
            if s_start > lo:
                lo = hi  # already tried the forced symbol at this cell
        else:
            lo = s_start
            hi = nn
        for s in range(lo, hi):
            bit = np.int64(1) << s
            if (xmask[i] | ymask[j] | zmask[k]) & bit:
                continue
            delta = (
                _popcount(xmask[i] >> (s + 1))
                + _popcount(ymask[j] >> (s + 1))
                + _popcount(zmask[k] >> (s + 1))
            )
            sdelta = _popcount(sjm[s] >> (j + 1)) + _popcount(skm[s] >> (k + 1))
            xmask[i] |= bit
            ymask[j] |= bit
            zmask[k] |= bit
            sjm[s] |= np.int64(1) << j
            skm[s] |= np.int64(1) << k
            choice[p] = s
            pd[p] = delta & 1
            sd[p] = sdelta & 1
            parity ^= delta & 1
            sparity ^= sdelta & 1
            nodes += 1
            if budget >= 0 and nodes > budget:
                return total, even, odd, sym_even, sym_odd, nodes, np.int64(0)
            placed = True
            break
        if placed:
            p += 1
            s_start = 0
        else:
            p -= 1
            while p >= 0:
                s = choice[p]
                i, j, k = ci[p], cj[p], ck[p]
                bit = np.int64(1) << s
                xmask[i] &= ~bit
                ymask[j] &= ~bit
                zmask[k] &= ~bit
                sjm[s] &= ~(np.int64(1) << j)
                skm[s] &= ~(np.int64(1) << k)
                parity ^= pd[p]
                sparity ^= sd[p]
                if forced[p] >= 0:
                    p -= 1
                    continue
                s_start = s + 1
                break
            if p < 0:
                break
    return total, even, odd, sym_even, sym_odd, nodes, np.int64(1)
