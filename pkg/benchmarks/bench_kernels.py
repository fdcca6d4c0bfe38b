"""Compare the compiled solver kernels with the pure-Python fallback.

Both backends run the identical sweep algorithm, so the loads they produce
agree to machine precision; the benchmark reports wall time and speedup on a
grid of random instance sizes.

Usage: python benchmarks/bench_kernels.py [--sizes 200 1000 5000] [--seed 0]
"""

import argparse
import time

import numpy as np

from hyperbalance import _kernels
from hyperbalance._kernels import _py
from hyperbalance.balance import pack_edges
from hyperbalance.hypergraph import Hypergraph

try:
    from hyperbalance._kernels import _core
except ImportError:
    _core = None


def random_instance(rng, n):
    edges = set()
    target = int(1.2 * n)
    while len(edges) < target:
        k = int(rng.integers(2, 5))
        edges.add(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
    return Hypergraph(n, tuple(sorted(edges)))


def run(kernel_mod, which, H, eps=None, tol=1e-10):
    edge_ptr, edge_vtx = pack_edges(H)
    theta = np.concatenate([np.full(len(e), 1.0 / len(e)) for e in H.edges])
    lv = np.zeros(H.n)
    np.add.at(lv, edge_vtx, theta)
    start = time.perf_counter()
    if which == "exact":
        sweeps, delta = kernel_mod.balance_sweeps(
            edge_ptr, edge_vtx, theta, lv, tol, 100_000
        )
    else:
        sweeps, delta = kernel_mod.epsilon_sweeps(
            edge_ptr, edge_vtx, theta, lv, eps, 1.0, tol, 100_000
        )
    elapsed = time.perf_counter() - start
    return elapsed, sweeps, lv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 5000])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--eps", type=float, default=0.2)
    args = parser.parse_args()

    print(f"active backend: {_kernels.BACKEND}")
    if _core is None:
        print("compiled extension unavailable; benchmarking fallback only")

    header = f"{'kernel':8s} {'n':>6s} {'python[s]':>10s} {'cython[s]':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(args.seed)
    for which in ("exact", "epsilon"):
        for n in args.sizes:
            H = random_instance(rng, n)
            t_py, sweeps_py, lv_py = run(_py, which, H, eps=args.eps)
            if _core is not None:
                t_cy, sweeps_cy, lv_cy = run(_core, which, H, eps=args.eps)
                agree = float(np.max(np.abs(lv_py - lv_cy)))
                assert agree < 1e-9, f"backends disagree by {agree}"
                assert sweeps_py == sweeps_cy
                print(f"{which:8s} {n:6d} {t_py:10.3f} {t_cy:10.3f} "
                      f"{t_py / t_cy:7.1f}x")
            else:
                print(f"{which:8s} {n:6d} {t_py:10.3f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
