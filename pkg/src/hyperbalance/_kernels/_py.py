"""Pure-Python reference kernels, signature-compatible with the extension.

Both kernels run Gauss-Seidel sweeps over the edges in input order and stop
when the sup-norm change of the load vector over a full sweep drops below
``tol``.  Arrays use the flattened layout produced by
:func:`hyperbalance.balance.pack_edges`: ``edge_ptr[j]:edge_ptr[j+1]`` slices
``edge_vtx``/``theta`` for edge j.
"""

import math


def balance_sweeps(edge_ptr, edge_vtx, theta, loads, tol, max_sweeps):
    """Exact water-filling sweeps minimizing the sum of squared loads.

    Each edge is an exact strictly convex subproblem: with residuals
    r_i = load_i - theta(e,i), the new theta(e,i) = max(lam - r_i, 0) where
    lam solves sum_i max(lam - r_i, 0) = 1, found by breakpoint scan.
    Returns (sweeps_used, last_sweep_delta); theta and loads are updated
    in place.
    """
    m = len(edge_ptr) - 1
    n = len(loads)
    prev = [0.0] * n
    delta = 0.0
    for sweep in range(1, max_sweeps + 1):
        for v in range(n):
            prev[v] = loads[v]
        for j in range(m):
            lo, hi = edge_ptr[j], edge_ptr[j + 1]
            size = hi - lo
            r = [loads[edge_vtx[p]] - theta[p] for p in range(lo, hi)]
            rs = sorted(r)
            acc = 0.0
            lam = rs[0] + 1.0
            for k in range(size):
                acc += rs[k]
                cand = (1.0 + acc) / (k + 1)
                if k + 1 == size or cand <= rs[k + 1]:
                    lam = cand
                    break
            for idx in range(size):
                p = lo + idx
                new = lam - r[idx]
                if new < 0.0:
                    new = 0.0
                change = new - theta[p]
                if change != 0.0:
                    theta[p] = new
                    loads[edge_vtx[p]] += change
        delta = max(abs(loads[v] - prev[v]) for v in range(n)) if n else 0.0
        if delta < tol:
            return sweep, delta
    return max_sweeps, delta


def _entropy_root(a, eps):
    """Solve exp(u) + eps*u = a for u, assuming a <= 1 (so the root is <= 0).

    The left side is convex and increasing in u, and f(0) = 1 - a >= 0, so
    Newton from u = 0 decreases monotonically to the root.
    """
    u = 0.0
    for _ in range(100):
        f = math.exp(u) + eps * u - a
        if f <= 1e-16:
            break
        u -= f / (math.exp(u) + eps)
    return u


def _entropy_waterfill(r, eps, out):
    """Exact minimizer of sum_i (r_i + x_i)^2/2 + eps*x_i*log x_i on the simplex.

    Stationarity gives x_i + eps*log x_i = mu - r_i with mu chosen so the x_i
    sum to 1.  S(mu) = sum_i x_i(mu) is convex and increasing, and at
    mu = min r + 1 the largest coordinate is exactly 1, so Newton from there
    descends monotonically to the multiplier.
    """
    size = len(r)
    mu = min(r) + 1.0
    for _ in range(200):
        total = 0.0
        slope = 0.0
        for i in range(size):
            x = math.exp(_entropy_root(mu - r[i], eps))
            out[i] = x
            total += x
            slope += x / (x + eps)
        if abs(total - 1.0) <= 1e-14 * size:
            break
        mu -= (total - 1.0) / slope
    z = sum(out[:size])
    for i in range(size):
        out[i] /= z


def epsilon_sweeps(edge_ptr, edge_vtx, theta, loads, eps, alpha, tol, max_sweeps):
    """Block-coordinate descent sweeps for the smoothed balance condition.

    Each edge is minimized exactly over its simplex for the entropic
    potential sum_i load_i^2/2 + eps * sum theta log theta, whose stationary
    points are precisely the softmax condition theta(e,i) proportional to
    exp(-load_i/eps).  The step moves the fraction alpha of the way to the
    block minimizer, which is still a descent step by convexity.  Returns
    (sweeps_used, last_sweep_delta); theta and loads updated in place.
    """
    m = len(edge_ptr) - 1
    n = len(loads)
    prev = [0.0] * n
    maxsize = max((edge_ptr[j + 1] - edge_ptr[j] for j in range(m)), default=0)
    r = [0.0] * maxsize
    x = [0.0] * maxsize
    delta = 0.0
    for sweep in range(1, max_sweeps + 1):
        for v in range(n):
            prev[v] = loads[v]
        for j in range(m):
            lo, hi = edge_ptr[j], edge_ptr[j + 1]
            size = hi - lo
            for idx in range(size):
                p = lo + idx
                r[idx] = loads[edge_vtx[p]] - theta[p]
            _entropy_waterfill(r[:size], eps, x)
            for idx in range(size):
                p = lo + idx
                new = (1.0 - alpha) * theta[p] + alpha * x[idx]
                change = new - theta[p]
                if change != 0.0:
                    theta[p] = new
                    loads[edge_vtx[p]] += change
        delta = max(abs(loads[v] - prev[v]) for v in range(n)) if n else 0.0
        if delta < tol:
            return sweep, delta
    return max_sweeps, delta
