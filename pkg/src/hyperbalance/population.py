"""Population-dynamics solution of the load fixed-point system.

For each edge size k present in the type distribution, the law Q_k of the
inverse-response value across a size-k edge satisfies a recursive
distributional equation: a fresh sample is

    t - sum over sizes k' and i < Gamma(k') of
        clamp01(1 - X(k',i,1)^+ - ... - X(k',i,k'-1)^+)

with Gamma drawn from the size-biased law for k and the X's drawn from the
current pools.  Each law is represented by a finite pool of samples; the
mean-excess function and the limiting maximum load are then Monte-Carlo
functionals of the solved pools.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from hyperbalance.sampling import TypeDistribution, size_biased


@dataclass
class RDEParams:
    pool_size: int = 100_000
    iterations: int = 200
    ks_tol: float = 5e-3
    eval_samples: int = 200_000
    seed: int = 0
    rho_tol: float = 1e-2

    def __post_init__(self):
        for name in ("pool_size", "iterations", "eval_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.ks_tol <= 0 or self.rho_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class RDEPool:
    """Per edge size, a sample pool approximating the fixed-point law."""

    pools: dict[int, np.ndarray]
    iterations: int = 0
    converged: bool = False
    ks_trajectory: list[float] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["k", "value"])
        for k in sorted(self.pools):
            for x in self.pools[k]:
                writer.writerow([k, repr(float(x))])
        return buf.getvalue()


def _active_sizes(P: TypeDistribution) -> list[int]:
    return [k for k in P.sizes() if float(P.mean_count(k)) > 0]


def _offspring_sums(table: TypeDistribution, pools: dict[int, np.ndarray],
                    count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent draws of the double sum of clamp01 terms.

    The outer type is drawn from ``table``; each size-k' slot consumes k'-1
    independent pool samples.  Vectorized by grouping draws per type.
    """
    out = np.zeros(count)
    idx = rng.choice(len(table.table), size=count, p=table.probs())
    for which, (gamma, _) in enumerate(table.table):
        rows = np.nonzero(idx == which)[0]
        if rows.size == 0 or not gamma.counts:
            continue
        total = np.zeros(rows.size)
        for k2, cnt in gamma.counts:
            pool = pools[k2]
            picks = rng.integers(0, pool.size, size=(rows.size, cnt, k2 - 1))
            inner = np.maximum(pool[picks], 0.0).sum(axis=2)
            total += np.clip(1.0 - inner, 0.0, 1.0).sum(axis=1)
        out[rows] = total
    return out


def rde_iterate(P: TypeDistribution, t: float, pools: RDEPool,
                rng: np.random.Generator) -> RDEPool:
    """One synchronous resampling step of every pool from the current state."""
    biased = {k: size_biased(P, k) for k in pools.pools}
    new_pools = {}
    for k in sorted(pools.pools):
        n = pools.pools[k].size
        new_pools[k] = t - _offspring_sums(biased[k], pools.pools, n, rng)
    return RDEPool(new_pools, pools.iterations + 1)


def _ks_quantile_distance(a: np.ndarray, b: np.ndarray, points: int = 512) -> float:
    """Kolmogorov distance between two empirical CDFs on a pooled quantile grid.

    The grid draws from both samples so that atoms present in only one of
    them are still probed (the sup is attained at a sample point of either).
    """
    qs = (np.arange(points) + 0.5) / points
    grid = np.union1d(np.quantile(a, qs), np.quantile(b, qs))
    ca = np.searchsorted(np.sort(a), grid, side="right") / a.size
    cb = np.searchsorted(np.sort(b), grid, side="right") / b.size
    return float(np.max(np.abs(ca - cb)))


def rde_solve(P: TypeDistribution, t: float, params: RDEParams | None = None):
    """Iterate the pools from the all-t start until successive empirical CDFs
    are within the Kolmogorov threshold, or the iteration cap is reached.

    Non-convergence is flagged in the returned diagnostics, not fatal.
    """
    params = params or RDEParams()
    rng = np.random.default_rng(params.seed)
    sizes = _active_sizes(P)
    state = RDEPool({k: np.full(params.pool_size, float(t)) for k in sizes})
    trajectory = []
    converged = False
    # two independent pools drawn from the same law differ by ~1.92/sqrt(N)
    # in Kolmogorov distance, so that noise floor is added to the threshold
    threshold = params.ks_tol + 1.92 / math.sqrt(params.pool_size)
    for _ in range(params.iterations):
        new = rde_iterate(P, t, state, rng)
        ks = max(
            (_ks_quantile_distance(state.pools[k], new.pools[k]) for k in sizes),
            default=0.0,
        )
        trajectory.append(ks)
        state = new
        if ks < threshold:
            converged = True
            break
    state.converged = converged
    state.ks_trajectory = trajectory
    diagnostics = {
        "iterations": state.iterations,
        "converged": converged,
        "ks_trajectory": trajectory,
    }
    return state, diagnostics


def mean_excess(P: TypeDistribution, t: float, pools: RDEPool, M: int,
                rng: np.random.Generator):
    """Monte-Carlo estimate of the limiting mean load above level t.

    First term: sum over sizes k of (mean size-k multiplicity)/k times the
    probability that k independent clipped pool samples sum below 1.  Second
    term: t times the probability that the root's offspring sum exceeds t
    (root type from P).  Returns (phi, stderr, components).
    """
    term1 = 0.0
    var1 = 0.0
    for k in sorted(pools.pools):
        w = float(P.mean_count(k)) / k
        pool = pools.pools[k]
        picks = rng.integers(0, pool.size, size=(M, k))
        p_hat = float(np.mean(np.maximum(pool[picks], 0.0).sum(axis=1) < 1.0))
        term1 += w * p_hat
        var1 += w * w * p_hat * (1.0 - p_hat) / M
    sums = _offspring_sums(P, pools.pools, M, rng)
    q_hat = float(np.mean(sums > t))
    term2 = t * q_hat
    var2 = t * t * q_hat * (1.0 - q_hat) / M
    phi = term1 - term2
    stderr = math.sqrt(var1 + var2)
    return phi, stderr, {"term1": term1, "term2": term2}


def rho_limit(P: TypeDistribution, params: RDEParams | None = None) -> float:
    """Limiting maximum load: the largest t with positive mean excess.

    Bisection over t; positivity is declared when the estimate exceeds three
    standard errors.  Pools are re-solved at each probe with a seed derived
    from (params.seed, probe index) for reproducibility.
    """
    params = params or RDEParams()
    sizes = _active_sizes(P)
    if not sizes:
        return 0.0
    hi = float(max(
        max((g.degree() for g, _ in P.table), default=0),
        max(
            (max((g.degree() for g, _ in size_biased(P, k).table), default=0) + 1
             for k in sizes),
            default=0,
        ),
        1,
    ))
    lo = 0.0
    probe = 0

    def positive(t: float) -> bool:
        nonlocal probe
        probe += 1
        sub = RDEParams(
            pool_size=params.pool_size,
            iterations=params.iterations,
            ks_tol=params.ks_tol,
            eval_samples=params.eval_samples,
            seed=params.seed + probe,
            rho_tol=params.rho_tol,
        )
        pools, _ = rde_solve(P, t, sub)
        rng = np.random.default_rng(sub.seed + 10**6)
        phi, stderr, _ = mean_excess(P, t, pools, params.eval_samples, rng)
        return phi > 3.0 * stderr

    if not positive(lo):
        return 0.0
    while hi - lo > params.rho_tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phi_result_json(t: float, phi: float, stderr: float, components: dict) -> str:
    return json.dumps(
        {
            "t": t,
            "phi": phi,
            "stderr": stderr,
            "term1": components["term1"],
            "term2": components["term2"],
        }
    )
