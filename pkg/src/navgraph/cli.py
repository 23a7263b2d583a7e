"""Command line interface: build / verify / route / gen / setcover / bench.

Exit codes: 0 success, 1 verification or budget failure, 2 input/format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np

from navgraph import dataset, instances, navbuild, setcover, verify

METRICS = {
    "l2": "euclidean",
    "l2sq": "squared-euclidean",
    "l1": "manhattan",
    "matrix": "explicit-matrix",
}

GEN_KINDS = (
    "line",
    "grid",
    "uniform",
    "clusters",
    "covering-general",
    "covering-euclidean",
    "planted-cover",
)


def _load_input(path: str, metric: str, header: bool) -> tuple[dataset.PointSet, dataset.DistanceOracle]:
    kind = METRICS[metric]
    if kind == "explicit-matrix":
        matrix = dataset.load_matrix(path)
        ps = dataset.PointSet(n=matrix.shape[0])
        return ps, dataset.DistanceOracle(kind, ps, matrix=matrix)
    ps = dataset.load_points(path, header=header)
    return ps, dataset.DistanceOracle(kind, ps)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("NAVGRAPH_THREADS")
    return max(1, int(env)) if env else 1


def _cmd_build(args) -> int:
    ps, oracle = _load_input(args.input, args.metric, args.header)
    kwargs = {"preset": args.preset}
    if args.algo == "full":
        g, report = navbuild.build_full(ps, oracle, args.seed, checked=args.checked, **kwargs)
    elif args.algo == "simple":
        g, report = navbuild.build_simple(ps, oracle, args.seed, **kwargs)
    elif args.algo == "alpha":
        g, report = navbuild.build_alpha(ps, oracle, args.alpha, args.seed, **kwargs)
    elif args.algo == "tau":
        g, report = navbuild.build_tau(ps, oracle, args.tau, args.seed, **kwargs)
    elif args.algo == "clique":
        t0 = time.perf_counter()
        g = navbuild.build_clique_baseline(ps, oracle)
        report = navbuild._report("clique", g, None, t0)
    elif args.algo == "greedy":
        t0 = time.perf_counter()
        g = navbuild.build_classic_greedy(ps, oracle)
        report = navbuild._report("greedy", g, None, t0)
    else:
        raise ValueError(f"unknown algo {args.algo}")
    dataset.save_graph(args.out, g)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"{args.algo}: n={g.n} edges={g.edge_count} avg_degree={g.avg_degree:.2f}")
    return 0


def _cmd_verify(args) -> int:
    ps, oracle = _load_input(args.input, args.metric, args.header)
    g = dataset.load_graph(args.graph, n=ps.n)
    cap = args.max_violations
    if args.property == "nav":
        violations = verify.verify_navigable(ps, oracle, g, max_violations=cap)
    elif args.property == "alpha":
        violations = verify.verify_alpha(ps, oracle, g, args.alpha, max_violations=cap)
    else:
        violations = verify.verify_tau(ps, oracle, g, args.tau, max_violations=cap)
    for v in violations:
        print(f"{v.source} {v.target}")
    return 0 if not violations else 1


def _cmd_route(args) -> int:
    ps, oracle = _load_input(args.input, args.metric, args.header)
    g = dataset.load_graph(args.graph, n=ps.n)
    path = verify.greedy_route(ps, oracle, g, args.start, args.query)
    print(" ".join(str(p) for p in path))
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "planted-cover":
        system = instances.gen_planted_cover(args.elements, args.opt, args.sets_count, args.seed)
        system.save(args.out)
        print(f"planted-cover: n={system.n_elements} m={system.m_sets} opt={args.opt} -> {args.out}")
        return 0
    if args.kind in ("covering-general", "covering-euclidean"):
        system = instances.gen_planted_cover(args.elements, args.opt, args.sets_count, args.seed)
        if args.kind == "covering-general":
            _, oracle, lay = instances.gen_covering_general(system, args.solutions, args.seed)
            dataset.save_matrix(args.out, oracle.matrix, binary=not args.text)
        else:
            ps, _, lay = instances.gen_covering_euclidean(system, args.solutions, args.seed)
            dataset.save_points(args.out, ps)
        print(f"{args.kind}: points={lay.n_points} -> {args.out}")
        return 0
    kind = "gaussian-clusters" if args.kind == "clusters" else args.kind
    ps = instances.gen_points(kind, args.n, dim=args.dim, seed=args.seed)
    dataset.save_points(args.out, ps)
    print(f"{args.kind}: n={ps.n} dim={ps.dim} -> {args.out}")
    return 0


def _cmd_setcover(args) -> int:
    system = setcover.SetSystem.load(args.instance)
    if args.algo == "greedy":
        sol = setcover.greedy_set_cover(system)
    elif args.algo == "vote":
        if args.budget:
            sol = setcover.cvc_stop_early(system, args.budget, args.seed)
        else:
            sol = setcover.construct_vote_cover(system, args.seed)
    elif args.algo == "limited":
        sol = setcover.construct_limited_vote_cover(system, args.seed)
    else:
        sol = setcover.construct_limited_vote_cover(system, args.seed, lazy=True)
    if not sol.ok:
        print("FAIL")
        return 1
    assert verify.check_cover(system, sol.chosen), "solver returned a non-cover"
    print(f"cover size {len(sol.chosen)}")
    for s in sol.chosen:
        print(s)
    return 0


def _bench_cell(algo: str, family: str, n: int, dim: int, metric: str, seed: int) -> dict:
    kind = "gaussian-clusters" if family == "clusters" else family
    ps = instances.gen_points(kind, n, dim=dim, seed=seed)
    oracle = dataset.DistanceOracle(METRICS[metric], ps)
    t0 = time.perf_counter()
    if algo == "full":
        g, _ = navbuild.build_full(ps, oracle, seed)
    elif algo == "simple":
        g, _ = navbuild.build_simple(ps, oracle, seed)
    elif algo == "clique":
        g = navbuild.build_clique_baseline(ps, oracle)
    elif algo == "greedy":
        g = navbuild.build_classic_greedy(ps, oracle)
    else:
        raise ValueError(f"unknown bench algo {algo}")
    build_ms = (time.perf_counter() - t0) * 1000.0
    t1 = time.perf_counter()
    ok = not verify.verify_navigable(ps, oracle, g, max_violations=1)
    verify_ms = (time.perf_counter() - t1) * 1000.0
    return {
        "algo": algo,
        "n": n,
        "dim": dim,
        "metric": metric,
        "seed": seed,
        "edges": g.edge_count,
        "avg_degree": round(g.avg_degree, 4),
        "max_degree": g.max_degree,
        "build_ms": round(build_ms, 3),
        "verify_ms": round(verify_ms, 3),
        "verified": ok,
    }


def _cmd_bench(args) -> int:
    algos = args.algos.split(",")
    sizes = [int(x) for x in args.sizes.split(",")]
    rows = []
    for algo in algos:
        for n in sizes:
            for seed in range(args.seeds):
                rows.append(_bench_cell(algo, args.family, n, args.dim, args.metric, seed))
    fieldnames = list(rows[0].keys())
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    if args.fit_slope and len(sizes) >= 2:
        for algo in algos:
            med = []
            for n in sizes:
                times = sorted(r["build_ms"] for r in rows if r["algo"] == algo and r["n"] == n)
                med.append(times[len(times) // 2])
            slope = np.polyfit(np.log(sizes), np.log(med), 1)[0]
            print(f"slope[{algo}] = {slope:.3f}", file=sys.stderr)
    return 0 if all(r["verified"] for r in rows) else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="navgraph", description=__doc__)
    p.add_argument("--threads", type=int, default=None, help="parallelism cap (or NAVGRAPH_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("--input", required=True, help="points CSV, or distance matrix for --metric matrix")
        sp.add_argument("--metric", choices=sorted(METRICS), default="l2")
        sp.add_argument("--header", action="store_true", help="skip one CSV header line")

    b = sub.add_parser("build", help="construct a search graph")
    add_input(b)
    b.add_argument("--algo", required=True, choices=["full", "simple", "clique", "greedy", "alpha", "tau"])
    b.add_argument("--alpha", type=float, default=1.0)
    b.add_argument("--tau", type=float, default=0.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--report", default=None)
    b.add_argument("--preset", choices=navbuild.PRESETS, default="paper")
    b.add_argument("--checked", action="store_true", help="enable internal invariant assertions")
    b.set_defaults(fn=_cmd_build)

    v = sub.add_parser("verify", help="check a graph against a property")
    add_input(v)
    v.add_argument("--graph", required=True)
    v.add_argument("--property", choices=["nav", "alpha", "tau"], default="nav")
    v.add_argument("--alpha", type=float, default=1.0)
    v.add_argument("--tau", type=float, default=0.0)
    v.add_argument("--max-violations", type=int, default=None)
    v.set_defaults(fn=_cmd_verify)

    r = sub.add_parser("route", help="greedy-route from a start node to a query node")
    add_input(r)
    r.add_argument("--graph", required=True)
    r.add_argument("--start", type=int, required=True)
    r.add_argument("--query", type=int, required=True)
    r.set_defaults(fn=_cmd_route)

    g = sub.add_parser("gen", help="generate points, covering point sets, or planted covers")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    g.add_argument("--n", type=int, default=64)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--elements", type=int, default=6, help="covering/planted: universe size")
    g.add_argument("--sets-count", type=int, default=4, help="covering/planted: number of sets")
    g.add_argument("--opt", type=int, default=2, help="covering/planted: planted optimum")
    g.add_argument("--solutions", type=int, default=1, help="covering: solution point count")
    g.add_argument("--text", action="store_true", help="write matrices as CSV instead of binary")
    g.set_defaults(fn=_cmd_gen)

    s = sub.add_parser("setcover", help="solve a set-cover instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=["greedy", "vote", "limited", "lazy"], default="greedy")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=None, help="stop-early budget for --algo vote")
    s.set_defaults(fn=_cmd_setcover)

    be = sub.add_parser("bench", help="run a build/verify matrix and emit CSV")
    be.add_argument("--algos", default="full,simple,clique,greedy")
    be.add_argument("--sizes", default="64,256")
    be.add_argument("--seeds", type=int, default=1)
    be.add_argument("--family", default="uniform", choices=["uniform", "clusters", "grid", "line"])
    be.add_argument("--dim", type=int, default=8)
    be.add_argument("--metric", choices=sorted(METRICS), default="l2")
    be.add_argument("--out", default=None)
    be.add_argument("--fit-slope", action="store_true")
    be.set_defaults(fn=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except (dataset.FormatError, ValueError, IndexError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
