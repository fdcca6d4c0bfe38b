"""Balanced and softmax-smoothed allocations on finite hypergraphs.

An allocation assigns each edge's unit load fractionally to its own vertices.
The exact solver runs block-coordinate descent on the sum of squared total
loads: each edge is rebalanced by exact water-filling, which converges to the
unique balanced load vector.  The smoothed solver runs the same descent on
the entropic potential (squared loads plus eps times allocation entropy),
whose per-edge optimality condition is exactly the softmax balance equation;
for any eps > 0 the smoothed allocation on a finite hypergraph is unique,
and its loads approach the balanced loads as eps -> 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from hyperbalance import _kernels
from hyperbalance.hypergraph import Hypergraph

LOAD_CONSERVATION_TOL = 1e-9


class ConvergenceError(RuntimeError):
    """Solver failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Allocation:
    """Per-edge rows of nonnegative fractions, aligned with the edge's
    vertex list and summing to 1."""

    theta: tuple[tuple[float, ...], ...]

    def validate(self, H: Hypergraph, tol: float = 1e-12) -> None:
        if len(self.theta) != H.m:
            raise ValueError("allocation/edge count mismatch")
        for row, e in zip(self.theta, H.edges):
            if len(row) != len(e):
                raise ValueError("allocation row/edge size mismatch")
            if any(x < -tol for x in row):
                raise ValueError("negative allocation entry")
            if abs(sum(row) - 1.0) > tol:
                raise ValueError(f"allocation row sums to {sum(row)}, not 1")

    def to_json(self) -> str:
        return json.dumps({"theta": [list(r) for r in self.theta]})


@dataclass
class SolveParams:
    """Solver knobs shared by the exact and smoothed paths.

    ``tol`` bounds the sup-norm load change per sweep.  In smoothed mode the
    effective tolerance is capped below at 1e-12/epsilon, since the softmax
    map's sensitivity scales like 1/eps.
    """

    epsilon: float | None = None
    damping: float = 0.5
    tol: float = 1e-10
    max_iters: int = 1_000_000

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must be in (0, 1]")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def pack_edges(H: Hypergraph):
    """Flatten edges to (edge_ptr, edge_vtx) int64 arrays for the kernels."""
    edge_ptr = np.zeros(H.m + 1, dtype=np.int64)
    for j, e in enumerate(H.edges):
        edge_ptr[j + 1] = edge_ptr[j] + len(e)
    edge_vtx = np.fromiter(
        (v for e in H.edges for v in e), dtype=np.int64, count=int(edge_ptr[-1])
    )
    return edge_ptr, edge_vtx


def _as_baseload(H: Hypergraph, b) -> np.ndarray:
    if b is None:
        return np.zeros(H.n)
    b = np.asarray(b, dtype=float)
    if b.shape != (H.n,):
        raise ValueError(f"baseload must have length {H.n}")
    if not np.all(np.isfinite(b)):
        raise ValueError("baseload must be finite")
    return b


def _uniform_theta(H: Hypergraph) -> np.ndarray:
    return np.concatenate([np.full(len(e), 1.0 / len(e)) for e in H.edges]) \
        if H.m else np.zeros(0)


def _unflatten(H: Hypergraph, flat: np.ndarray) -> Allocation:
    rows, pos = [], 0
    for e in H.edges:
        rows.append(tuple(float(x) for x in flat[pos:pos + len(e)]))
        pos += len(e)
    return Allocation(tuple(rows))


def loads(H: Hypergraph, theta: Allocation, b=None) -> np.ndarray:
    """Total load per vertex: baseload plus received edge fractions."""
    theta.validate(H, tol=1e-9)
    out = _as_baseload(H, b).copy()
    for e, row in zip(H.edges, theta.theta):
        for v, x in zip(e, row):
            out[v] += x
    return out


def balance(H: Hypergraph, b=None, params: SolveParams | None = None,
            init: Allocation | None = None):
    """Exact balanced allocation and its (unique) load vector.

    Round-robin water-filling sweeps until the sup-norm load change over a
    sweep is below ``params.tol``.  Raises :class:`ConvergenceError` when the
    iteration cap is hit first.  ``init`` overrides the uniform starting
    allocation; the load vector reached is the same from any start.
    """
    params = params or SolveParams()
    base = _as_baseload(H, b)
    edge_ptr, edge_vtx = pack_edges(H)
    if init is not None:
        init.validate(H, tol=1e-9)
        theta = np.concatenate([np.asarray(r, dtype=float) for r in init.theta]) \
            if H.m else np.zeros(0)
    else:
        theta = _uniform_theta(H)
    lv = base.copy()
    np.add.at(lv, edge_vtx, theta)
    sweeps, delta = _kernels.balance_sweeps(
        edge_ptr, edge_vtx, theta, lv, params.tol, params.max_iters
    )
    if delta >= params.tol:
        raise ConvergenceError(f"balance: no convergence in {sweeps} sweeps", delta)
    return _unflatten(H, theta), lv


def epsilon_balance(H: Hypergraph, b=None, params: SolveParams | None = None) -> Allocation:
    """The eps-balanced allocation: softmax of minus loads over each edge.

    Block-coordinate descent on the entropic potential; each edge's simplex
    subproblem is solved exactly, and its stationarity condition is the
    defining softmax equation.  The returned allocation satisfies that
    equation within the effective tolerance at every edge-vertex pair.
    """
    params = params or SolveParams(epsilon=1.0)
    if params.epsilon is None:
        raise ValueError("epsilon_balance requires params.epsilon")
    eps = params.epsilon
    tol = max(params.tol, 1e-12 / eps)
    base = _as_baseload(H, b)
    edge_ptr, edge_vtx = pack_edges(H)
    theta = _uniform_theta(H)
    lv = base.copy()
    np.add.at(lv, edge_vtx, theta)
    iters, delta = _kernels.epsilon_sweeps(
        edge_ptr, edge_vtx, theta, lv, eps, params.damping, tol, params.max_iters
    )
    if delta >= tol:
        raise ConvergenceError(
            f"epsilon_balance: no convergence in {iters} sweeps", delta
        )
    return _unflatten(H, theta)


def epsilon_residual(H: Hypergraph, theta: Allocation, b=None, eps: float = 1.0) -> float:
    """Max deviation of theta from the softmax defining equation."""
    lv = loads(H, theta, b)
    worst = 0.0
    for e, row in zip(H.edges, theta.theta):
        le = lv[list(e)]
        w = np.exp(-(le - le.min()) / eps)
        target = w / w.sum()
        worst = max(worst, float(np.max(np.abs(np.asarray(row) - target))))
    return worst


def rebalance_edge(theta: Allocation, H: Hypergraph, b, e_idx: int) -> Allocation:
    """Water-fill a single edge, leaving all other rows untouched.

    Minimizes the sum of squared total loads over redistributions of edge
    ``e_idx``: with r_i the load at i excluding this edge's contribution, the
    new row is (lam - r_i)^+ with lam chosen so the row sums to 1.
    """
    lv = loads(H, theta, b)
    e = H.edges[e_idx]
    row = theta.theta[e_idx]
    r = [lv[v] - x for v, x in zip(e, row)]
    rs = sorted(r)
    lam = rs[0] + 1.0
    acc = 0.0
    for k, val in enumerate(rs):
        acc += val
        cand = (1.0 + acc) / (k + 1)
        if k + 1 == len(rs) or cand <= rs[k + 1]:
            lam = cand
            break
    new_row = tuple(max(lam - ri, 0.0) for ri in r)
    rows = list(theta.theta)
    rows[e_idx] = new_row
    return Allocation(tuple(rows))


@dataclass(frozen=True)
class BalanceReport:
    """Outcome of the edge-local balance check."""

    max_violation: float
    witness: tuple[int, int, int] | None = field(default=None)  # (edge, i, j)

    def passed(self, tol: float) -> bool:
        return self.max_violation < tol


def verify_balanced(H: Hypergraph, theta: Allocation, b=None, tol: float = 1e-8) -> BalanceReport:
    """Check the edge-local condition: positive fractions only at edge-minimal loads.

    The reported violation is max over edges e and i, j in e of
    theta(e,i) * (load_i - load_j)^+.
    """
    lv = loads(H, theta, b)
    worst, witness = 0.0, None
    for j_edge, (e, row) in enumerate(zip(H.edges, theta.theta)):
        le = lv[list(e)]
        lmin = float(le.min())
        jmin = e[int(np.argmin(le))]
        for v, x, lval in zip(e, row, le):
            viol = x * max(lval - lmin, 0.0)
            if viol > worst:
                worst, witness = viol, (j_edge, v, jmin)
    return BalanceReport(worst, witness)


def mean_excess_finite(load_vec, t: float) -> float:
    """Average load above level t: (1/n) sum_i (l_i - t)^+."""
    lv = np.asarray(load_vec, dtype=float)
    return float(np.maximum(lv - t, 0.0).mean())


def variational_gap(H: Hypergraph, theta: Allocation, b=None, t: float = 0.0) -> float:
    """Mean excess minus its variational lower bound at the indicator maximizer.

    With f = 1{load > t}, the bound is (1/n)[sum_e min_{j in e} f(j)
    - t sum_i f(i)]; for a balanced allocation the gap vanishes.
    """
    lv = loads(H, theta, b)
    f = (lv > t).astype(float)
    lhs = mean_excess_finite(lv, t)
    edge_term = sum(min(f[v] for v in e) for e in H.edges)
    rhs = (edge_term - t * f.sum()) / H.n
    return float(lhs - rhs)


def response_epsilon(H: Hypergraph, i: int, t: float, eps: float,
                     params: SolveParams | None = None) -> float:
    """Total load at vertex i under the smoothed allocation with an injected
    baseload t at i and zero elsewhere."""
    if not 0 <= i < H.n:
        raise ValueError(f"vertex {i} out of range")
    base = np.zeros(H.n)
    base[i] = t
    p = params or SolveParams()
    p = SolveParams(epsilon=eps, damping=p.damping, tol=p.tol, max_iters=p.max_iters)
    theta = epsilon_balance(H, base, p)
    return float(loads(H, theta, base)[i])
