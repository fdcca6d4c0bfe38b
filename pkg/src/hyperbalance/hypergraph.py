"""Hypergraph data model: parsing, neighborhoods, tree tests, canonical codes.

Vertices are dense 0-based indices.  A simple hypergraph has edges that are
sets of at least two distinct vertices, with no two edges sharing the same
vertex set.  A multihypergraph relaxes both restrictions (repeated vertices
within an edge and repeated edges are allowed).
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field


class HypergraphError(ValueError):
    """Raised on malformed or inconsistent hypergraph input."""


@dataclass(frozen=True)
class Hypergraph:
    """Simple hypergraph on vertices 0..n-1 with an ordered list of edges."""

    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise HypergraphError("vertex count must be nonnegative")
        seen = set()
        norm = []
        for e in self.edges:
            e = tuple(sorted(e))
            if len(e) < 2:
                raise HypergraphError(f"edge {e} has size < 2")
            if len(set(e)) != len(e):
                raise HypergraphError(f"repeated vertex in edge {e}")
            if e[0] < 0 or e[-1] >= self.n:
                raise HypergraphError(f"vertex index out of range in edge {e}")
            if e in seen:
                raise HypergraphError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def incidence(self) -> list[list[int]]:
        """Per-vertex list of incident edge indices, in edge order."""
        inc = [[] for _ in range(self.n)]
        for j, e in enumerate(self.edges):
            for v in e:
                inc[v].append(j)
        return inc

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})


@dataclass(frozen=True)
class MultiHypergraph:
    """Multihypergraph: edges are multisets, repeats of vertices and edges allowed."""

    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        norm = []
        for e in self.edges:
            e = tuple(sorted(e))
            if len(e) < 2:
                raise HypergraphError(f"edge {e} has size < 2")
            if e[0] < 0 or e[-1] >= self.n:
                raise HypergraphError(f"vertex index out of range in edge {e}")
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "edges": [list(e) for e in self.edges], "multi": True}
        )


def parse_hypergraph(text: str):
    """Parse the JSON wire format ``{"n": ..., "edges": [[...], ...]}``.

    Returns a :class:`MultiHypergraph` when ``"multi": true`` is set,
    otherwise a validated :class:`Hypergraph`.  Malformed input, out-of-range
    indices, repeated vertices and duplicate edges are errors, never fixed
    silently.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HypergraphError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise HypergraphError("expected object with 'n' and 'edges'")
    n, edges = obj["n"], obj["edges"]
    if not isinstance(n, int) or not isinstance(edges, list):
        raise HypergraphError("'n' must be int and 'edges' a list")
    edges_t = []
    for e in edges:
        if not isinstance(e, list) or not all(isinstance(v, int) for v in e):
            raise HypergraphError(f"edge {e} must be a list of ints")
        edges_t.append(tuple(e))
    if obj.get("multi"):
        return MultiHypergraph(n, tuple(edges_t))
    return Hypergraph(n, tuple(edges_t))


def parse_baseload(text: str, n: int) -> list[float]:
    """Parse ``{"b": [...]}`` and check length/finiteness against ``n``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HypergraphError(f"invalid JSON: {exc}") from exc
    b = obj.get("b") if isinstance(obj, dict) else None
    if not isinstance(b, list) or len(b) != n:
        raise HypergraphError(f"baseload must be a list of length {n}")
    out = [float(x) for x in b]
    if not all(x == x and abs(x) != float("inf") for x in out):
        raise HypergraphError("baseload values must be finite")
    return out


def degree(H: Hypergraph, v: int) -> int:
    if not 0 <= v < H.n:
        raise HypergraphError(f"vertex {v} out of range")
    return sum(1 for e in H.edges if v in e)


def is_hypertree(H) -> bool:
    """True iff the bipartite vertex-edge incidence graph is a forest.

    For simple hypergraphs this is equivalent to the absence of closed
    alternating vertex/edge paths; the equivalence is property-tested against
    a brute-force path search.
    """
    parent = list(range(H.n + len(H.edges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, e in enumerate(H.edges):
        enode = H.n + j
        for v in e:
            rv, re = find(v), find(enode)
            if rv == re:
                return False
            parent[rv] = re
    return True


def truncate(H: Hypergraph, delta: int) -> Hypergraph:
    """Keep only edges of size <= delta all of whose vertices have degree <= delta."""
    if delta < 1:
        raise HypergraphError("truncation bound must be >= 1")
    deg = H.degrees()
    kept = tuple(
        e for e in H.edges if len(e) <= delta and all(deg[v] <= delta for v in e)
    )
    return Hypergraph(H.n, kept)


@dataclass(frozen=True)
class Ball:
    """Depth-d neighborhood of a root, re-indexed to dense local indices.

    ``vertex_map[local] = original`` pulls loads computed on the ball back to
    the host hypergraph.  ``is_tree`` flags whether the ball is a hypertree.
    """

    graph: Hypergraph
    root: int
    depth: int
    is_tree: bool
    vertex_map: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.vertex_map:
            object.__setattr__(self, "vertex_map", tuple(range(self.graph.n)))


def ball(H: Hypergraph, root: int, d: int, incidence=None) -> Ball:
    """Induced sub-hypergraph on vertices within hypergraph distance d of root.

    The edge set is the set of edges with all endpoints inside the ball.
    Discovery order is breadth-first and deterministic, so re-indexing is
    reproducible.  ``incidence`` may be precomputed for repeated calls.
    """
    if not 0 <= root < H.n:
        raise HypergraphError(f"root {root} out of range")
    if d < 0:
        raise HypergraphError("depth must be >= 0")
    if incidence is None:
        incidence = H.incidence()
    dist = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if dist[v] >= d:
            continue
        for j in incidence[v]:
            for w in H.edges[j]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    order.append(w)
                    queue.append(w)
    local = {v: i for i, v in enumerate(order)}
    kept = []
    seen_edges = set()
    for v in order:
        for j in incidence[v]:
            if j in seen_edges:
                continue
            seen_edges.add(j)
            e = H.edges[j]
            if all(w in local for w in e):
                kept.append(tuple(sorted(local[w] for w in e)))
    sub = Hypergraph(len(order), tuple(kept))
    return Ball(sub, 0, d, is_hypertree(sub), tuple(order))


def canonical_code(T: Ball) -> str:
    """Isomorphism-invariant code for a rooted hypertree.

    Two rooted hypertrees get equal codes iff they are isomorphic as rooted
    hypergraphs.  Child codes are length-prefixed and sorted, so the encoding
    is unambiguous without escaping.
    """
    if not T.is_tree:
        raise HypergraphError("canonical_code requires a hypertree")
    H, root = T.graph, T.root
    inc = H.incidence()

    def vcode(v: int, parent_edge: int) -> str:
        child_codes = []
        for j in inc[v]:
            if j == parent_edge:
                continue
            member_codes = sorted(vcode(w, j) for w in H.edges[j] if w != v)
            ec = "".join(f"{len(c)}:{c}" for c in member_codes)
            child_codes.append(f"e{len(H.edges[j])}[{ec}]")
        child_codes.sort()
        return "v(" + "".join(f"{len(c)}:{c}" for c in child_codes) + ")"

    return vcode(root, -1)
