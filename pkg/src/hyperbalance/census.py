"""Depth-d neighborhood censuses and empirical convergence testing.

A census maps canonical rooted-hypertree codes to probability masses; balls
that are not hypertrees are pooled under the reserved key "non-tree".  The
total-variation distance between the census of a large random hypergraph and
an empirical branching-tree census quantifies local weak convergence.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hyperbalance.hypergraph import Ball, Hypergraph, ball, canonical_code
from hyperbalance.sampling import TypeDistribution, sample_ugwt

NON_TREE_KEY = "non-tree"


@dataclass(frozen=True)
class Census:
    """Exact masses per neighborhood class (Fractions summing to 1)."""

    masses: tuple[tuple[str, Fraction], ...]
    sample_size: int

    def __post_init__(self):
        total = sum(m for _, m in self.masses)
        if total != 1 and self.sample_size > 0:
            raise ValueError(f"census masses sum to {total}")

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.masses)

    def mass(self, key: str) -> Fraction:
        return self.as_dict().get(key, Fraction(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["code", "mass"])
        for code, m in self.masses:
            writer.writerow([code, float(m)])
        return buf.getvalue()


def _census_from_counts(counts: Counter, total: int) -> Census:
    rows = tuple(
        (code, Fraction(cnt, total)) for code, cnt in sorted(counts.items())
    )
    return Census(rows, total)


def explore(H: Hypergraph, root: int, d: int, incidence=None) -> Ball:
    """Breadth-first depth-d neighborhood of a root; alias of the ball
    extraction, exposed for census use on large sparse hypergraphs."""
    return ball(H, root, d, incidence=incidence)


def neighborhood_census(H: Hypergraph, d: int) -> Census:
    """Exact depth-d census over all vertices (each root counted once)."""
    if H.n == 0:
        raise ValueError("empty hypergraph")
    incidence = H.incidence()
    counts: Counter = Counter()
    for v in range(H.n):
        b = explore(H, v, d, incidence=incidence)
        counts[canonical_code(b) if b.is_tree else NON_TREE_KEY] += 1
    return _census_from_counts(counts, H.n)


def ugwt_census(P: TypeDistribution, d: int, samples: int,
                rng: np.random.Generator) -> Census:
    """Empirical census of independent branching-hypertree draws."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    counts: Counter = Counter()
    for _ in range(samples):
        counts[canonical_code(sample_ugwt(P, d, rng))] += 1
    return _census_from_counts(counts, samples)


def tv_distance(a: Census, b: Census) -> float:
    """Total-variation distance: half the L1 gap over the union of keys."""
    da, db = a.as_dict(), b.as_dict()
    keys = set(da) | set(db)
    return float(sum(abs(da.get(k, 0) - db.get(k, 0)) for k in keys)) / 2.0
