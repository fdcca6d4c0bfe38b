"""Exact loads on finite hypertrees via the inverse-response recursion.

For a directed subtree T_{e->i} (the component of i after deleting edge e),
the inverse response value at level t satisfies

    inv(e->i, t) = t - sum over edges e' at i other than e of
                   clamp01(1 - sum_{j in e', j != i} inv(e'->j, t)^+)

with inv = t at leaves.  A vertex's load exceeds t iff the same sum taken
over *all* edges at the vertex exceeds t, which makes the load computable by
bisection: the test is nonincreasing in t.
"""

from __future__ import annotations

import numpy as np

from hyperbalance.hypergraph import Ball, Hypergraph, HypergraphError, is_hypertree


def _clamp01(x):
    return np.clip(x, 0.0, 1.0)


class _TreeIndex:
    """Rooted incidence structure with traversal orders for the two-pass DP."""

    def __init__(self, H: Hypergraph, root: int):
        if not is_hypertree(H):
            raise HypergraphError("not a hypertree")
        self.H = H
        self.root = root
        inc = H.incidence()
        self.inc = inc
        self.parent_edge = [-1] * H.n
        self.parent_vertex = [-1] * H.m  # vertex of the edge closest to root
        order = [root]
        seen_v = {root}
        seen_e = set()
        # BFS over the incidence tree; edge order along the frontier is
        # deterministic (edges in index order per vertex).
        frontier = [root]
        self.edge_order = []
        while frontier:
            nxt = []
            for v in frontier:
                for j in inc[v]:
                    if j in seen_e:
                        continue
                    seen_e.add(j)
                    self.parent_vertex[j] = v
                    self.edge_order.append(j)
                    for w in H.edges[j]:
                        if w not in seen_v:
                            seen_v.add(w)
                            self.parent_edge[w] = j
                            order.append(w)
                            nxt.append(w)
            frontier = nxt
        if len(seen_v) != H.n:
            raise HypergraphError("hypertree must be connected from the root")
        self.vertex_order = order
        self.children_edges = [[] for _ in range(H.n)]
        for j in self.edge_order:
            self.children_edges[self.parent_vertex[j]].append(j)


def _tree_index(T: Ball) -> _TreeIndex:
    if not T.is_tree:
        raise HypergraphError("input is not a hypertree")
    return _TreeIndex(T.graph, T.root)


def _dp_terms(idx: _TreeIndex, t: np.ndarray):
    """Inverse-response values for every directed edge-vertex pair, two passes.

    ``t`` is a vector of levels; every returned value is a vector of the same
    shape.  Returns (down, A, up, sum_down):
      down[(e, c)] = inv(e->c, t) for c a non-parent endpoint of edge e,
      A[e]         = clamp01(1 - sum of down[(e, c)]^+ over those c), the
                     term edge e contributes at its parent vertex,
      up[e]        = inv(e->p, t) for p the parent endpoint of e,
      sum_down[e]  = sum of down[(e, c)]^+ over non-parent endpoints c.
    """
    H = idx.H
    t = np.asarray(t, dtype=float)
    down, A = {}, {}
    for j in reversed(idx.edge_order):
        e = H.edges[j]
        p = idx.parent_vertex[j]
        s = np.zeros_like(t)
        for c in e:
            if c == p:
                continue
            total = np.zeros_like(t)
            for j2 in idx.children_edges[c]:
                total = total + A[j2]
            down[(j, c)] = t - total
            s = s + np.maximum(down[(j, c)], 0.0)
        A[j] = _clamp01(1.0 - s)

    up, sum_down = {}, {}
    for j in idx.edge_order:
        p = idx.parent_vertex[j]
        total = np.zeros_like(t)
        for j2 in idx.children_edges[p]:
            if j2 != j:
                total = total + A[j2]
        f = idx.parent_edge[p]
        if f >= 0:
            # term of edge f as seen from its child p: exclude p's own branch
            others = np.maximum(up[f], 0.0) + sum_down[f] - np.maximum(down[(f, p)], 0.0)
            total = total + _clamp01(1.0 - others)
        up[j] = t - total
        s = np.zeros_like(t)
        for c in H.edges[j]:
            if c != p:
                s = s + np.maximum(down[(j, c)], 0.0)
        sum_down[j] = s
    return down, A, up, sum_down


def _vertex_sums(idx: _TreeIndex, t: np.ndarray) -> np.ndarray:
    """Matrix S[v] of the threshold-test sums, one row per vertex, vectorized in t."""
    H = idx.H
    t = np.atleast_1d(np.asarray(t, dtype=float))
    down, A, up, sum_down = _dp_terms(idx, t)
    S = np.zeros((H.n,) + t.shape)
    for v in range(H.n):
        total = np.zeros_like(t)
        for j in idx.children_edges[v]:
            total = total + A[j]
        f = idx.parent_edge[v]
        if f >= 0:
            others = np.maximum(up[f], 0.0) + sum_down[f] - np.maximum(down[(f, v)], 0.0)
            total = total + _clamp01(1.0 - others)
        S[v] = total
    return S


def response_inverse(T: Ball, cut_edge: int, retained: int, t: float) -> float:
    """Inverse response value of the directed subtree T_{cut_edge -> retained}.

    ``retained`` must belong to the cut edge; the subtree excludes the cut
    edge and everything reached through it.  Leaves return t (empty sum).
    """
    idx = _tree_index(T)
    H = T.graph
    if not 0 <= cut_edge < H.m or retained not in H.edges[cut_edge]:
        raise HypergraphError("retained vertex must belong to the cut edge")

    memo = {}

    def inv(e: int, i: int) -> float:
        key = (e, i)
        if key in memo:
            return memo[key]
        total = 0.0
        for e2 in idx.inc[i]:
            if e2 == e:
                continue
            s = sum(max(inv(e2, j), 0.0) for j in H.edges[e2] if j != i)
            total += min(max(1.0 - s, 0.0), 1.0)
        memo[key] = t - total
        return memo[key]

    return inv(cut_edge, retained)


def root_load_exceeds(T: Ball, t: float) -> bool:
    """Threshold test: true iff the balanced load at the root exceeds t."""
    idx = _tree_index(T)
    S = _vertex_sums(idx, np.array([t]))
    return bool(S[T.root, 0] > t)


def tree_loads(T: Ball, precision: float = 1e-9) -> np.ndarray:
    """Balanced loads of every vertex of a finite hypertree, by bisection.

    Each vertex's load is sup{t : threshold test passes}; the test is
    evaluated for all vertices simultaneously (one two-pass sweep of the tree
    per bisection round, vectorized over the per-vertex midpoints).
    """
    idx = _tree_index(T)
    H = T.graph
    deg = np.array(H.degrees(), dtype=float)
    lo = np.full(H.n, -precision)
    hi = deg + precision
    vids = np.arange(H.n)
    while np.max(hi - lo) > precision:
        mid = 0.5 * (lo + hi)
        S = _vertex_sums(idx, mid)
        exceeds = S[vids, vids] > mid
        lo = np.where(exceeds, mid, lo)
        hi = np.where(exceeds, hi, mid)
    return 0.5 * (lo + hi)
