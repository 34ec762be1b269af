"""Compiled inner loops for tree induction and prediction.

Trees grow iteratively over presorted per-feature index arrays supplied by the
caller: each split stably partitions every feature's index slice, so nodes
never re-sort. A bootstrap resample is passed as integer multiplicity weights
over the base rows (absent rows filtered from the order arrays), which trains
the exact tree of the duplicated multiset without materializing it.

Candidate splits are the midpoints between consecutive distinct sorted values;
a node picks the best gain-ratio candidate among those whose information gain
reaches the mean gain over all candidates considered at that node. With
max_depth == 1 the single split is instead chosen to minimize the weighted
misclassification cost, which is what the data-driven threshold extraction
reads off the root.

When instance weights are non-negative integers the class-weight sums are
exact integers, so the x*log2(x) entropy terms come from a precomputed table
instead of log calls; both paths agree bit-for-bit on integer weights.

Node arrays: feature[i] < 0 marks a leaf; children ids are local to the tree.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_MASK = U64(0xFFFFFFFFFFFFFFFF)


def xlogx_table(n: int) -> np.ndarray:
    ks = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1, dtype=np.float64)
    if n >= 1:
        out[1:] = ks[1:] * np.log2(ks[1:])
    return out


@njit(cache=True, nogil=True, inline="always")
def _mix64(state):
    # splitmix64: deterministic per-tree stream for feature subsampling
    state = (state + U64(0x9E3779B97F4A7C15)) & _MASK
    z = state
    z = ((z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)) & _MASK
    z = ((z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)) & _MASK
    z = z ^ (z >> U64(31))
    return z, state


@njit(cache=True, nogil=True, inline="always")
def _xlogx(x):
    if x <= 0.0:
        return 0.0
    return x * np.log2(x)


@njit(cache=True, nogil=True)
def grow_tree(X, y, w, w_int, order, m_try, min_total_w, max_depth,
              stump_cost_mode, seed, use_table, xlt):
    """Grow one unpruned binary tree; returns packed node arrays.

    X is (n_base, d) float64 (Fortran order preferred), y int8 {0,1}.
    order is (d, n_sub) int32 of base-row ids presorted per feature; it is
    consumed (partitioned in place), so callers pass a fresh copy. With
    use_table, w_int carries the integer weights and xlt must cover their
    total; otherwise w carries float weights. max_depth <= 0 is unbounded.
    """
    n_sub = order.shape[1]
    d = X.shape[1]
    cap = 2 * n_sub + 1
    feat = np.full(cap, -1, np.int16)
    thr = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    w_warn = np.zeros(cap, np.float64)
    w_safe = np.zeros(cap, np.float64)

    tmp = np.empty(n_sub, np.int32)
    tmp2 = np.empty(n_sub, np.int32)
    go_left = np.empty(X.shape[0], np.uint8)
    cand_gain = np.empty(n_sub * d, np.float64)
    cand_score = np.empty(n_sub * d, np.float64)
    cand_thr = np.empty(n_sub * d, np.float64)
    cand_feat = np.empty(n_sub * d, np.int16)
    feats = np.empty(d, np.int64)

    stack_lo = np.empty(2 * n_sub + 2, np.int64)
    stack_hi = np.empty(2 * n_sub + 2, np.int64)
    stack_id = np.empty(2 * n_sub + 2, np.int64)
    stack_dep = np.empty(2 * n_sub + 2, np.int64)
    stack_lo[0] = 0
    stack_hi[0] = n_sub
    stack_id[0] = 0
    stack_dep[0] = 0
    top = 1
    n_nodes = 1
    rng = U64(seed)

    while top > 0:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        node = stack_id[top]
        depth = stack_dep[top]

        if use_table:
            i1 = 0
            it = 0
            for j in range(lo, hi):
                i = order[0, j]
                it += w_int[i]
                if y[i] == 1:
                    i1 += w_int[i]
            w1 = float(i1)
            w0 = float(it - i1)
        else:
            w1 = 0.0
            w0 = 0.0
            for j in range(lo, hi):
                i = order[0, j]
                if y[i] == 1:
                    w1 += w[i]
                else:
                    w0 += w[i]
        w_warn[node] = w1
        w_safe[node] = w0
        wt = w1 + w0

        if w1 <= 0.0 or w0 <= 0.0 or wt < min_total_w or \
                (max_depth > 0 and depth >= max_depth):
            continue

        # sample m_try features without replacement, iterate them ascending
        for f in range(d):
            feats[f] = f
        m = m_try if m_try < d else d
        for i2 in range(m):
            z, rng = _mix64(rng)
            j2 = i2 + int(z % U64(d - i2))
            t2 = feats[i2]
            feats[i2] = feats[j2]
            feats[j2] = t2
        for a in range(m):
            for b in range(a + 1, m):
                if feats[b] < feats[a]:
                    t2 = feats[a]
                    feats[a] = feats[b]
                    feats[b] = t2

        n_cand = 0
        gain_sum = 0.0
        if use_table and not stump_cost_mode:
            ct = it
            c1 = i1
            c0 = ct - c1
            h_node = xlt[ct] - xlt[c1] - xlt[c0]
            split_norm = xlt[ct]
            for fi in range(m):
                f = feats[fi]
                a1 = 0
                al = 0
                xj = X[order[f, lo], f]
                for j in range(lo, hi - 1):
                    i = order[f, j]
                    al += w_int[i]
                    if y[i] == 1:
                        a1 += w_int[i]
                    xn = X[order[f, j + 1], f]
                    if xn > xj:
                        a0 = al - a1
                        b1 = c1 - a1
                        b0 = c0 - a0
                        ar = ct - al
                        h_children = (xlt[al] - xlt[a1] - xlt[a0]
                                      + xlt[ar] - xlt[b1] - xlt[b0])
                        gain = (h_node - h_children) / wt
                        split_info = (split_norm - xlt[al] - xlt[ar]) / wt
                        cand_gain[n_cand] = gain
                        cand_score[n_cand] = gain / split_info if split_info > 0.0 else 0.0
                        gain_sum += gain
                        cand_thr[n_cand] = 0.5 * (xj + xn)
                        cand_feat[n_cand] = f
                        n_cand += 1
                    xj = xn
        else:
            h_node = _xlogx(wt) - _xlogx(w1) - _xlogx(w0)
            for fi in range(m):
                f = feats[fi]
                a1 = 0.0
                a0 = 0.0
                xj = X[order[f, lo], f]
                for j in range(lo, hi - 1):
                    i = order[f, j]
                    if y[i] == 1:
                        a1 += w[i]
                    else:
                        a0 += w[i]
                    xn = X[order[f, j + 1], f]
                    if xn > xj:
                        b1 = w1 - a1
                        b0 = w0 - a0
                        wl = a1 + a0
                        wr = b1 + b0
                        if stump_cost_mode:
                            el = a1 if a1 < a0 else a0
                            er = b1 if b1 < b0 else b0
                            cand_gain[n_cand] = 0.0
                            cand_score[n_cand] = -(el + er)
                        else:
                            h_children = (_xlogx(wl) - _xlogx(a1) - _xlogx(a0)
                                          + _xlogx(wr) - _xlogx(b1) - _xlogx(b0))
                            split_info = (_xlogx(wt) - _xlogx(wl) - _xlogx(wr)) / wt
                            gain = (h_node - h_children) / wt
                            cand_gain[n_cand] = gain
                            cand_score[n_cand] = gain / split_info if split_info > 0.0 else 0.0
                            gain_sum += gain
                        cand_thr[n_cand] = 0.5 * (xj + xn)
                        cand_feat[n_cand] = f
                        n_cand += 1
                    xj = xn

        if n_cand == 0:
            continue

        best = -1
        best_score = -1.0e300
        if stump_cost_mode:
            for c in range(n_cand):
                if cand_score[c] > best_score:
                    best_score = cand_score[c]
                    best = c
        else:
            mean_gain = gain_sum / n_cand
            for c in range(n_cand):
                if cand_gain[c] > 0.0 and cand_gain[c] >= mean_gain and \
                        cand_score[c] > best_score:
                    best_score = cand_score[c]
                    best = c
        if best < 0:
            continue

        bf = cand_feat[best]
        bt = cand_thr[best]

        for j in range(lo, hi):
            i = order[0, j]
            go_left[i] = 1 if X[i, bf] <= bt else 0
        nl = 0
        for f in range(d):
            kl = 0
            kr = 0
            for j in range(lo, hi):
                i = order[f, j]
                if go_left[i] == 1:
                    tmp[kl] = i
                    kl += 1
                else:
                    tmp2[kr] = i
                    kr += 1
            nl = kl
            for j in range(kl):
                order[f, lo + j] = tmp[j]
            for j in range(kr):
                order[f, lo + kl + j] = tmp2[j]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feat[node] = bf
        thr[node] = bt
        left[node] = lid
        right[node] = rid
        # push right first so the left child is processed next (preorder ids)
        stack_lo[top] = lo + nl
        stack_hi[top] = hi
        stack_id[top] = rid
        stack_dep[top] = depth + 1
        top += 1
        stack_lo[top] = lo
        stack_hi[top] = lo + nl
        stack_id[top] = lid
        stack_dep[top] = depth + 1
        top += 1

    return (feat[:n_nodes].copy(), thr[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), w_warn[:n_nodes].copy(), w_safe[:n_nodes].copy())


@njit(cache=True, nogil=True)
def tree_leaf_stats(feat, thr, left, right, Q):
    """Leaf node id per query row."""
    m = Q.shape[0]
    out = np.empty(m, np.int32)
    for q in range(m):
        node = 0
        while feat[node] >= 0:
            if Q[q, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[q] = node
    return out


@njit(cache=True, nogil=True)
def forest_votes(feat, thr, left, right, w_warn, w_safe, offsets, Q):
    """Warning votes per query over a packed forest.

    offsets has len n_trees+1; tree t occupies [offsets[t], offsets[t+1]) in
    the concatenated node arrays with tree-local child ids. A tree votes its
    leaf's weighted majority, ties voting Warning.
    """
    m = Q.shape[0]
    n_trees = offsets.shape[0] - 1
    votes = np.zeros(m, np.int32)
    for q in range(m):
        v = 0
        for t in range(n_trees):
            base = offsets[t]
            node = 0
            while feat[base + node] >= 0:
                if Q[q, feat[base + node]] <= thr[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            if w_warn[base + node] >= w_safe[base + node]:
                v += 1
        votes[q] = v
    return votes


# ---------------------------------------------------------------------------
# Python-side helpers
# ---------------------------------------------------------------------------

_EMPTY_INT = np.zeros(0, dtype=np.int64)
_EMPTY_TAB = np.zeros(1, dtype=np.float64)


def presort(X: np.ndarray) -> np.ndarray:
    """Per-feature argsort of the base rows, (d, n) int32."""
    n, d = X.shape
    order = np.empty((d, n), dtype=np.int32)
    for f in range(d):
        order[f] = np.argsort(X[:, f], kind="stable").astype(np.int32)
    return order


def integer_weights(w: np.ndarray) -> np.ndarray | None:
    """Round-trip w to int64 if every weight is a non-negative integer."""
    wi = np.rint(w).astype(np.int64)
    if np.all(wi >= 0) and np.all(wi.astype(np.float64) == w):
        return wi
    return None


def build_tree(X, y, w, order, m_try, min_total_w, max_depth, stump_cost_mode, seed):
    """Dispatch to the integer-table or float path of grow_tree."""
    wi = integer_weights(w)
    if wi is not None and not stump_cost_mode:
        xlt = xlogx_table(int(wi.sum()))
        return grow_tree(X, y, w, wi, order, m_try, min_total_w, max_depth,
                         False, seed, True, xlt)
    return grow_tree(X, y, w, _EMPTY_INT, order, m_try, min_total_w, max_depth,
                     stump_cost_mode, seed, False, _EMPTY_TAB)
