"""Type distributions, size-biasing, random hypertrees, configuration model.

A vertex type counts the incident edges of each size (size >= 2, finitely
many nonzero entries).  A type distribution is a finite probability table
over types; the size-biased table for edge size m is the child-type law seen
across a size-m edge.  Samplers are deterministic functions of their inputs
and a seeded numpy Generator.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hyperbalance.hypergraph import Ball, Hypergraph, HypergraphError, MultiHypergraph


@dataclass(frozen=True)
class TypeVector:
    """Finite-support counts (size -> multiplicity), sizes >= 2."""

    counts: tuple[tuple[int, int], ...]  # sorted (size, count), counts > 0

    def __post_init__(self):
        norm = tuple(sorted((int(k), int(c)) for k, c in self.counts if c))
        for k, c in norm:
            if k < 2 or c < 0:
                raise ValueError(f"invalid type entry ({k}, {c})")
        object.__setattr__(self, "counts", norm)

    @classmethod
    def of(cls, mapping) -> "TypeVector":
        return cls(tuple(dict(mapping).items()))

    def get(self, k: int) -> int:
        for size, c in self.counts:
            if size == k:
                return c
        return 0

    def sizes(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.counts)

    def degree(self) -> int:
        return sum(c for _, c in self.counts)

    def add(self, k: int, delta: int = 1) -> "TypeVector":
        d = dict(self.counts)
        d[k] = d.get(k, 0) + delta
        if d[k] < 0:
            raise ValueError("negative count")
        return TypeVector.of(d)


ZERO_TYPE = TypeVector(())


@dataclass(frozen=True)
class TypeDistribution:
    """Finite probability table over type vectors.

    Probabilities may be floats or Fractions; size-biasing preserves exact
    rational arithmetic when given Fractions.
    """

    table: tuple[tuple[TypeVector, object], ...]

    def __post_init__(self):
        total = sum(p for _, p in self.table)
        if abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(total)}, not 1")
        if any(float(p) <= 0 for _, p in self.table):
            raise ValueError("probabilities must be positive")
        seen = set()
        for gamma, _ in self.table:
            if gamma in seen:
                raise ValueError(f"duplicate type {gamma}")
            seen.add(gamma)

    @classmethod
    def of(cls, pairs) -> "TypeDistribution":
        return cls(tuple(pairs))

    def sizes(self) -> tuple[int, ...]:
        return tuple(sorted({k for gamma, _ in self.table for k in gamma.sizes()}))

    def mean_count(self, k: int):
        """Expected multiplicity of size-k edges at a typical vertex."""
        return sum(p * gamma.get(k) for gamma, p in self.table)

    def probs(self) -> np.ndarray:
        return np.array([float(p) for _, p in self.table])

    def max_degree(self) -> int:
        return max((gamma.degree() for gamma, _ in self.table), default=0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "types": [
                    {"counts": {str(k): c for k, c in gamma.counts}, "p": float(p)}
                    for gamma, p in self.table
                ]
            }
        )


def parse_type_distribution(text: str) -> TypeDistribution:
    """Parse ``{"types": [{"counts": {"2": 1}, "p": 0.5}, ...]}``."""
    obj = json.loads(text)
    if not isinstance(obj, dict) or "types" not in obj:
        raise HypergraphError("expected object with 'types'")
    pairs = []
    for row in obj["types"]:
        gamma = TypeVector.of({int(k): int(c) for k, c in row["counts"].items()})
        p = row["p"]
        pairs.append((gamma, Fraction(p) if isinstance(p, str) else float(p)))
    return TypeDistribution.of(pairs)


def size_biased(P: TypeDistribution, m: int) -> TypeDistribution:
    """Child-type law across a size-m edge.

    Each parent type gamma' with gamma'(m) >= 1 contributes the type
    gamma' - e_m with weight gamma'(m) P(gamma'), normalized by the mean
    size-m multiplicity.  When that mean is zero the degenerate all-zero
    type is returned (the convention for an unreachable branch).
    """
    mean = P.mean_count(m)
    if float(mean) == 0.0:
        return TypeDistribution.of([(ZERO_TYPE, 1 if isinstance(mean, int) else 1.0)])
    acc: dict[TypeVector, object] = {}
    for gamma, p in P.table:
        c = gamma.get(m)
        if c >= 1:
            child = gamma.add(m, -1)
            w = c * p / mean
            acc[child] = acc.get(child, 0) + w
    return TypeDistribution.of(sorted(acc.items(), key=lambda kv: kv[0].counts))


def _draw_type(P: TypeDistribution, rng: np.random.Generator) -> TypeVector:
    idx = rng.choice(len(P.table), p=P.probs())
    return P.table[int(idx)][0]


def _grow_tree(root_type: TypeVector, P: TypeDistribution, depth: int,
               rng: np.random.Generator) -> Ball:
    """Expand a rooted hypertree breadth-first to the given depth.

    Non-root vertices reached through a size-s edge draw their remaining
    type from the size-biased law for s.  Vertices at the depth boundary get
    no further edges.
    """
    biased = {k: size_biased(P, k) for k in P.sizes()}
    edges: list[tuple[int, ...]] = []
    n = 1
    frontier = [(0, root_type)]
    for level in range(depth):
        nxt = []
        for v, gamma in frontier:
            for k, cnt in gamma.counts:
                for _ in range(cnt):
                    children = list(range(n, n + k - 1))
                    n += k - 1
                    edges.append(tuple(sorted([v] + children)))
                    if level + 1 < depth:
                        for c in children:
                            nxt.append((c, _draw_type(biased[k], rng)))
        frontier = nxt
    graph = Hypergraph(n, tuple(edges))
    return Ball(graph, 0, depth, True, tuple(range(n)))


def sample_ugwt(P: TypeDistribution, depth: int, rng: np.random.Generator) -> Ball:
    """Unimodular branching hypertree truncated at the given depth:
    root type from P, descendant types size-biased by the entry edge size."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    root_type = _draw_type(P, rng) if depth > 0 else ZERO_TYPE
    return _grow_tree(root_type, P, depth, rng)


def sample_gwt_k(P: TypeDistribution, k: int, depth: int,
                 rng: np.random.Generator) -> Ball:
    """Branching hypertree whose root type follows the size-k biased law."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    root_type = _draw_type(size_biased(P, k), rng) if depth > 0 else ZERO_TYPE
    return _grow_tree(root_type, P, depth, rng)


def draw_type_sequence(P: TypeDistribution, n: int,
                       rng: np.random.Generator) -> list[TypeVector]:
    """n i.i.d. types from P, minimally repaired so k divides each size-k
    stub total: for remainder r, k - r distinct vertices gain one stub."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = rng.choice(len(P.table), size=n, p=P.probs())
    seq = [P.table[int(i)][0] for i in idx]
    for k in P.sizes():
        r = sum(g.get(k) for g in seq) % k
        if r:
            fix = rng.choice(n, size=k - r, replace=False)
            for i in fix:
                seq[int(i)] = seq[int(i)].add(k, 1)
    return seq


def sample_config(seq: list[TypeVector], rng: np.random.Generator) -> MultiHypergraph:
    """Configuration-model multihypergraph from per-vertex stub counts.

    For each edge size k, the size-k stubs are uniformly partitioned into
    blocks of k; each block becomes one edge.  A uniform unordered partition
    induces the same edge law as a uniform matching permutation with k-cycles
    (each block collapses (k-1)! cyclic orders, a constant factor).
    """
    n = len(seq)
    sizes = sorted({k for g in seq for k in g.sizes()})
    edges: list[tuple[int, ...]] = []
    for k in sizes:
        stubs = [i for i, g in enumerate(seq) for _ in range(g.get(k))]
        if len(stubs) % k:
            raise ValueError(f"size-{k} stub total {len(stubs)} not divisible by {k}")
        order = rng.permutation(len(stubs))
        for start in range(0, len(stubs), k):
            block = [stubs[int(j)] for j in order[start:start + k]]
            edges.append(tuple(sorted(block)))
    return MultiHypergraph(n, tuple(edges))


def erase(M: MultiHypergraph) -> Hypergraph:
    """Simple hypergraph obtained by dropping self loops, then every copy of
    any repeated edge."""
    no_loops = [e for e in M.edges if len(set(e)) == len(e)]
    multiplicity = Counter(no_loops)
    kept = tuple(e for e in no_loops if multiplicity[e] == 1)
    return Hypergraph(M.n, kept)
