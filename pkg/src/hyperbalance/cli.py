"""Command-line driver for reproducible experiments.

Every command is a pure function of (inputs, flags, seed): rerunning with the
same seed and worker count produces byte-identical outputs.  Results land in
``<out>/<command>/<tag>/`` together with a manifest echoing the full
configuration.  Exit codes: 0 success, 1 usage/parse error, 2 numerical
non-convergence, 3 statistical acceptance failure (with --assert).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

import hyperbalance.census as cen
import hyperbalance.maxload as ml
import hyperbalance.population as pop
import hyperbalance.sampling as samp
from hyperbalance import balance as _balance
from hyperbalance.balance import (
    ConvergenceError,
    SolveParams,
    epsilon_balance,
    loads as vertex_loads,
    verify_balanced,
)
from hyperbalance.hypergraph import (
    Hypergraph,
    HypergraphError,
    MultiHypergraph,
    parse_baseload,
    parse_hypergraph,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_ASSERT_FAILED = 3


def _default_seed() -> int:
    env = os.environ.get("HYPERBALANCE_SEED")
    return int(env) if env else 0


def _outdir(args, command: str) -> Path:
    tag = args.tag or time.strftime("%Y%m%d-%H%M%S")
    path = Path(args.out) / command / tag
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(path: Path, command: str, args) -> None:
    config = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")
    }
    manifest = {"command": command, "config": config}
    (path / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2))


def _load_hypergraph(path: str) -> Hypergraph:
    H = parse_hypergraph(Path(path).read_text())
    if isinstance(H, MultiHypergraph):
        raise HypergraphError("expected a simple hypergraph (no 'multi' flag)")
    return H


def _csv_header(columns: str, seed) -> str:
    return f"# seed={seed}\n{columns}\n"


def cmd_balance(args) -> int:
    H = _load_hypergraph(args.hypergraph)
    b = parse_baseload(Path(args.baseload).read_text(), H.n) if args.baseload else None
    out = _outdir(args, "balance")
    _write_manifest(out, "balance", args)
    params = SolveParams(epsilon=args.eps, tol=args.tol, max_iters=args.max_iters)
    try:
        if args.eps is not None:
            theta = epsilon_balance(H, b, params)
        else:
            theta, _ = _balance(H, b, params)
    except ConvergenceError as exc:
        (out / "report.json").write_text(
            json.dumps({"converged": False, "residual": exc.residual})
        )
        print(f"balance: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    lv = vertex_loads(H, theta, b)
    report = verify_balanced(H, theta, b)
    (out / "allocation.json").write_text(theta.to_json())
    (out / "loads.json").write_text(json.dumps({"loads": [float(x) for x in lv]}))
    (out / "report.json").write_text(
        json.dumps(
            {
                "converged": True,
                "mode": "epsilon" if args.eps is not None else "exact",
                "max_violation": report.max_violation,
                "witness": list(report.witness) if report.witness else None,
            }
        )
    )
    print(f"wrote {out}")
    return EXIT_OK


def cmd_maxload(args) -> int:
    H = _load_hypergraph(args.hypergraph)
    out = _outdir(args, "maxload")
    _write_manifest(out, "maxload", args)
    if args.method == "allocation":
        try:
            rho = ml.rho_finite(H)
        except ConvergenceError as exc:
            print(f"maxload: {exc}", file=sys.stderr)
            return EXIT_NO_CONVERGENCE
        payload = json.dumps({"rho": rho, "density": None, "set": None})
    else:
        solver = ml.max_density_bruteforce if args.method == "brute" \
            else ml.max_density_flow
        payload = solver(H).to_json()
    (out / "result.json").write_text(payload)
    print(payload)
    return EXIT_OK


def cmd_sample(args) -> int:
    out = _outdir(args, "sample")
    _write_manifest(out, "sample", args)
    rng = np.random.default_rng(args.seed)
    if args.model == "config":
        if args.types:
            rows = json.loads(Path(args.types).read_text())["types"]
            seq = [samp.TypeVector.of({int(k): int(c) for k, c in row.items()})
                   for row in rows]
        else:
            if not args.dist or not args.n:
                print("config model needs --types or (--dist and --n)", file=sys.stderr)
                return EXIT_USAGE
            P = samp.parse_type_distribution(Path(args.dist).read_text())
            seq = samp.draw_type_sequence(P, args.n, rng)
        M = samp.sample_config(seq, rng)
        result = samp.erase(M) if args.erase else M
    else:
        if not args.dist:
            print(f"{args.model} model needs --dist", file=sys.stderr)
            return EXIT_USAGE
        P = samp.parse_type_distribution(Path(args.dist).read_text())
        if args.model == "ugwt":
            tree = samp.sample_ugwt(P, args.depth, rng)
        else:
            tree = samp.sample_gwt_k(P, args.gwt_size, args.depth, rng)
        result = tree.graph
    (out / "hypergraph.json").write_text(result.to_json())
    print(f"wrote {out / 'hypergraph.json'}")
    return EXIT_OK


def cmd_lwc(args) -> int:
    out = _outdir(args, "lwc")
    _write_manifest(out, "lwc", args)
    P = samp.parse_type_distribution(Path(args.dist).read_text())
    limit_rng = np.random.default_rng([args.seed, 0])
    limit = cen.ugwt_census(P, args.depth, args.ugwt_samples, limit_rng)
    rows = []
    for n in args.n_grid:
        for rep in range(args.reps):
            rng = np.random.default_rng([args.seed, n, rep + 1])
            seq = samp.draw_type_sequence(P, n, rng)
            H = samp.erase(samp.sample_config(seq, rng))
            emp = cen.neighborhood_census(H, args.depth)
            rows.append(
                (n, rep, cen.tv_distance(emp, limit), float(emp.mass(cen.NON_TREE_KEY)))
            )
    body = "".join(f"{n},{rep},{tv!r},{nt!r}\n" for n, rep, tv, nt in rows)
    (out / "tv.csv").write_text(
        _csv_header("n,rep,tv_distance,non_tree_mass", args.seed) + body
    )
    print(f"wrote {out / 'tv.csv'}")
    return EXIT_OK


def cmd_rde(args) -> int:
    out = _outdir(args, "rde")
    _write_manifest(out, "rde", args)
    P = samp.parse_type_distribution(Path(args.dist).read_text())
    params = pop.RDEParams(
        pool_size=args.pool_size,
        iterations=args.iterations,
        eval_samples=args.eval_samples,
        seed=args.seed,
        rho_tol=args.rho_tol,
    )
    if args.rho:
        rho = pop.rho_limit(P, params)
        payload = json.dumps({"rho": rho})
        (out / "rho.json").write_text(payload)
        print(payload)
        return EXIT_OK
    ts = [args.t] if args.t is not None else list(
        np.linspace(args.t_grid[0], args.t_grid[1], int(args.t_grid[2]))
    )
    if args.t is None and not ts:
        print("rde needs --t, --t-grid or --rho", file=sys.stderr)
        return EXIT_USAGE
    lines = []
    converged_all = True
    for i, t in enumerate(ts):
        sub = pop.RDEParams(
            pool_size=args.pool_size,
            iterations=args.iterations,
            eval_samples=args.eval_samples,
            seed=args.seed + i,
            rho_tol=args.rho_tol,
        )
        pools, diag = pop.rde_solve(P, float(t), sub)
        converged_all = converged_all and diag["converged"]
        rng = np.random.default_rng(sub.seed + 10**6)
        phi, stderr, comp = pop.mean_excess(P, float(t), pools, sub.eval_samples, rng)
        lines.append(
            f"{float(t)!r},{phi!r},{stderr!r},{comp['term1']!r},{comp['term2']!r}\n"
        )
    if args.t is not None:
        t = float(args.t)
        (out / "phi.json").write_text(
            pop.phi_result_json(t, phi, stderr, comp)
        )
        print((out / "phi.json").read_text())
    else:
        (out / "phi.csv").write_text(
            _csv_header("t,phi,stderr,term1,term2", args.seed) + "".join(lines)
        )
        print(f"wrote {out / 'phi.csv'}")
    return EXIT_OK if converged_all else EXIT_NO_CONVERGENCE


def cmd_experiment_maxload(args) -> int:
    out = _outdir(args, "experiment-maxload")
    _write_manifest(out, "experiment-maxload", args)
    P = samp.parse_type_distribution(Path(args.dist).read_text())
    params = pop.RDEParams(
        pool_size=args.pool_size,
        iterations=args.iterations,
        eval_samples=args.eval_samples,
        seed=args.seed,
        rho_tol=args.rho_tol,
    )
    rho_mu = pop.rho_limit(P, params)
    rows = []
    for n in args.n_grid:
        for rep in range(args.reps):
            rng = np.random.default_rng([args.seed, n, rep + 1])
            seq = samp.draw_type_sequence(P, n, rng)
            H = samp.erase(samp.sample_config(seq, rng))
            rows.append((n, rep, ml.rho_finite(H)))
    body = "".join(f"{n},{rep},{rho!r},{rho_mu!r}\n" for n, rep, rho in rows)
    (out / "maxload.csv").write_text(
        _csv_header("n,rep,rho_n,rho_limit", args.seed) + body
    )
    print(f"wrote {out / 'maxload.csv'}")
    if args.assert_convergence:
        medians = {
            n: float(np.median([r for nn, _, r in rows if nn == n]))
            for n in args.n_grid
        }
        gaps = [abs(medians[n] - rho_mu) for n in args.n_grid]
        ok = all(g2 <= g1 + 1e-9 for g1, g2 in zip(gaps, gaps[1:])) and gaps[-1] < 0.1
        if not ok:
            print(f"assertion failed: gaps {gaps}", file=sys.stderr)
            return EXIT_ASSERT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperbalance",
        description="Balanced load allocations on hypergraphs and their limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output base directory")
        p.add_argument("--tag", default=None, help="run tag (default: timestamp)")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--workers", type=int, default=1,
                       help="declared worker count (seed partitioning)")

    p = sub.add_parser("balance", help="balanced or eps-balanced allocation")
    p.add_argument("hypergraph")
    p.add_argument("--baseload", default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=1_000_000)
    common(p)
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("maxload", help="maximum load / densest subhypergraph")
    p.add_argument("hypergraph")
    p.add_argument("--method", choices=["brute", "flow", "allocation"],
                   default="flow")
    common(p)
    p.set_defaults(func=cmd_maxload)

    p = sub.add_parser("sample", help="random hypergraph/hypertree samplers")
    p.add_argument("--model", choices=["config", "ugwt", "gwtk"], required=True)
    p.add_argument("--dist", default=None, help="type distribution JSON file")
    p.add_argument("--types", default=None, help="explicit per-vertex types JSON")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--gwt-size", type=int, default=2,
                   help="entry edge size for the gwtk model")
    p.add_argument("--erase", action="store_true",
                   help="erase self loops and repeated edges")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("lwc", help="neighborhood-census convergence experiment")
    p.add_argument("dist")
    p.add_argument("--n-grid", type=int, nargs="+", default=[200, 800, 3200])
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--ugwt-samples", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_lwc)

    p = sub.add_parser("rde", help="population-dynamics fixed point / mean excess")
    p.add_argument("dist")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--t-grid", type=float, nargs=3, default=None,
                   metavar=("LO", "HI", "NUM"))
    p.add_argument("--rho", action="store_true", help="compute the limiting max load")
    p.add_argument("--pool-size", type=int, default=100_000)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--eval-samples", type=int, default=200_000)
    p.add_argument("--rho-tol", type=float, default=1e-2)
    common(p)
    p.set_defaults(func=cmd_rde)

    p = sub.add_parser("experiment-maxload",
                       help="finite max loads vs the limiting max load")
    p.add_argument("dist")
    p.add_argument("--n-grid", type=int, nargs="+", default=[200, 800, 3200])
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--pool-size", type=int, default=50_000)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--eval-samples", type=int, default=100_000)
    p.add_argument("--rho-tol", type=float, default=1e-2)
    p.add_argument("--assert", dest="assert_convergence", action="store_true",
                   help="exit 3 unless the median gap shrinks and ends < 0.1")
    common(p)
    p.set_defaults(func=cmd_experiment_maxload)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "rho", False) is False and args.command == "rde" \
            and args.t is None and args.t_grid is None:
        print("rde needs --t, --t-grid or --rho", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (HypergraphError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
