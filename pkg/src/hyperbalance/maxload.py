"""Maximum balanced load and densest-subhypergraph duality.

The maximum vertex load under the balanced allocation equals the maximum
edge density max over nonempty S of |E(S)|/|S|, where E(S) is the set of
edges entirely inside S.  Two exact solvers are provided: subset enumeration
(small n) and binary search on a min-cut network with exact rational
certificate recovery.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hyperbalance.balance import SolveParams, balance
from hyperbalance.hypergraph import Hypergraph

BRUTEFORCE_LIMIT = 22


@dataclass(frozen=True)
class DensityResult:
    """A maximizing vertex set with its exact density."""

    best_set: tuple[int, ...]
    density: Fraction
    rho: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "rho": self.rho,
                "density": f"{self.density.numerator}/{self.density.denominator}",
                "set": list(self.best_set),
            }
        )


def _edges_inside(H: Hypergraph, members: set[int]) -> int:
    return sum(1 for e in H.edges if all(v in members for v in e))


def max_density_bruteforce(H: Hypergraph) -> DensityResult:
    """Exact maximizer by subset enumeration (n <= 22).

    Ties are broken toward the smallest set, then lexicographically smallest
    vertex tuple.  Edgeless hypergraphs report density 0 on a single vertex.
    """
    if H.n > BRUTEFORCE_LIMIT:
        raise ValueError(f"bruteforce limited to n <= {BRUTEFORCE_LIMIT}")
    if H.n == 0:
        raise ValueError("empty vertex set")
    size = 1 << H.n
    counts = np.zeros(size, dtype=np.int32)
    for e in H.edges:
        mask = 0
        for v in e:
            mask |= 1 << v
        counts[mask] += 1
    # superset-sum: counts[S] = number of edges fully inside S
    for bit in range(H.n):
        step = 1 << bit
        idx = np.arange(size, dtype=np.int64)
        has = (idx & step).astype(bool)
        counts[has] += counts[idx[has] - step]
    popcount = np.zeros(size, dtype=np.int32)
    for bit in range(H.n):
        popcount[(np.arange(size) >> bit) & 1 == 1] += 1
    dens = counts[1:] / popcount[1:]
    best = float(dens.max())
    cand = np.nonzero(dens >= best - 1e-12)[0] + 1
    best_key = None
    for mask in cand:
        frac = Fraction(int(counts[mask]), int(popcount[mask]))
        members = tuple(v for v in range(H.n) if mask >> v & 1)
        key = (-frac, len(members), members)
        if best_key is None or key < best_key:
            best_key = key
    frac = -best_key[0]
    return DensityResult(best_key[2], frac, float(frac))


class _Dinic:
    """Max-flow with exact Fraction capacities on tiny networks."""

    def __init__(self, n_nodes: int):
        self.n = n_nodes
        self.to: list[int] = []
        self.cap: list[Fraction] = []
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]

    def add_edge(self, u: int, v: int, cap: Fraction) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(Fraction(0))

    def max_flow(self, s: int, t: int) -> Fraction:
        flow = Fraction(0)
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for eid in self.adj[u]:
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u: int, pushed: Fraction) -> Fraction:
                if u == t:
                    return pushed
                while it[u] < len(self.adj[u]):
                    eid = self.adj[u][it[u]]
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[eid]))
                        if got > 0:
                            self.cap[eid] -= got
                            self.cap[eid ^ 1] += got
                            return got
                    it[u] += 1
                return Fraction(0)

            while True:
                pushed = dfs(s, Fraction(10**9))
                if pushed == 0:
                    break
                flow += pushed

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _denser_than(H: Hypergraph, g: Fraction):
    """Witness set S with |E(S)|/|S| > g, or None.

    Min-cut network: source -> edge node (capacity 1), edge node -> its
    vertices (capacity m+1, never cut), vertex -> sink (capacity g).  The
    max flow is < m exactly when some nonempty S has |E(S)| - g|S| > 0,
    and the source side of the final cut exhibits one.
    """
    m = H.m
    s, t = 0, 1
    dinic = _Dinic(2 + m + H.n)
    for j, e in enumerate(H.edges):
        dinic.add_edge(s, 2 + j, Fraction(1))
        for v in e:
            dinic.add_edge(2 + j, 2 + m + v, Fraction(m + 1))
    for v in range(H.n):
        dinic.add_edge(2 + m + v, t, g)
    flow = dinic.max_flow(s, t)
    if flow >= m:
        return None
    side = dinic.source_side(s)
    return {v for v in range(H.n) if (2 + m + v) in side}


def max_density_flow(H: Hypergraph) -> DensityResult:
    """Exact densest subhypergraph via binary search over min-cut guesses.

    Distinct densities differ by at least 1/(n(n-1)), so the search stops as
    soon as the bracket is narrower than that; the lower end is always an
    exact density achieved by a witness set.
    """
    if H.n == 0:
        raise ValueError("empty vertex set")
    if H.m == 0:
        return DensityResult((0,), Fraction(0), 0.0)
    lo = Fraction(H.m, H.n)          # achieved by the full vertex set
    witness = set(range(H.n))
    hi = Fraction(H.m)               # density can never exceed m/1
    gap = Fraction(1, H.n * max(H.n - 1, 1))
    while hi - lo >= gap:
        g = (lo + hi) / 2
        better = _denser_than(H, g)
        if better is None:
            hi = g
        else:
            witness = better
            lo = Fraction(_edges_inside(H, witness), len(witness))
    members = tuple(sorted(witness))
    dens = Fraction(_edges_inside(H, witness), len(witness))
    return DensityResult(members, dens, float(dens))


def rho_finite(H: Hypergraph, params: SolveParams | None = None) -> float:
    """Maximum vertex load of the balanced allocation (zero baseload)."""
    if H.m == 0:
        return 0.0
    _, lv = balance(H, None, params)
    return float(lv.max())
