"""Command-line surface: fit, simulate, eval, exact and bench."""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import exact as exact_mod
from . import linalg, simulate
from .errors import (
    CausalOrderError,
    DimensionMismatch,
    NotPositiveDefinite,
    ParseError,
    TooManyVariables,
    UnknownNode,
    ZeroVarianceColumn,
)
from .graph import (
    Cpdag,
    Dag,
    as_cpdag,
    consistent_extension,
    read_graph,
    shd_cpdag,
    write_graph,
)
from .scoring import ScoreConfig, score_tolerance, total_score
from .search import SearchConfig, fit

EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_CAPACITY = 4

REPORT_COLUMNS = [
    "seed",
    "algo",
    "shd",
    "recovered",
    "learned_bic",
    "truth_bic",
    "wall_time_s",
    "restarts_executed",
]


def read_csv(path, header=True):
    """Read a numeric CSV; returns (labels, n x p array)."""
    rows = []
    labels = None
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if labels is None and header:
                labels = [c.strip() for c in row]
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise ParseError(f"non-numeric value {bad.strip()!r}", lineno)
            if not all(np.isfinite(rows[-1])):
                raise ParseError("non-finite value", lineno)
    if not rows:
        raise ParseError("no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError("rows have inconsistent column counts")
    data = np.array(rows)
    if labels is None:
        labels = [f"x{i}" for i in range(data.shape[1])]
    if len(labels) != data.shape[1]:
        raise ParseError("header width does not match data rows")
    return labels, data


def _is_float(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def write_csv(path, labels, data):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(labels) + "\n")
        for row in data:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _parse_noise(text):
    kind, _, rest = text.partition(":")
    if kind not in ("gaussian", "uniform"):
        raise ParseError(f"unknown noise kind {kind!r}")
    try:
        a, b = (float(x) for x in rest.split(","))
    except ValueError as exc:
        raise ParseError(f"malformed noise spec {text!r}") from exc
    return (kind, a, b)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        restarts=None if args.time_limit is not None else args.restarts,
        time_budget=args.time_limit,
        seed=args.seed,
        lam=args.penalty,
        init=args.init,
    )


def cmd_fit(args) -> int:
    labels, data = read_csv(args.data, header=not args.no_header)
    result = fit(data, _search_config(args), labels)
    write_graph(args.out, result.cpdag)
    print(f"bic: {result.total:.12g}")
    print(f"wall_time_s: {result.wall_time_s:.3f}")
    print(f"restarts_executed: {result.restarts_executed}")
    return 0


def cmd_simulate(args) -> int:
    spec = simulate.GraphSpec.parse(args.graph)
    params = simulate.AnmParams(
        noise=_parse_noise(args.noise),
        n=args.n,
        standardize=not args.raw,
    )
    inst = simulate.sample_instance(spec, params, args.seed)
    write_csv(args.out_prefix + ".data.csv", inst.truth.labels, inst.data)
    write_graph(args.out_prefix + ".truth.graph", inst.truth)
    write_graph(args.out_prefix + ".truth-cpdag.graph", inst.truth_cpdag)
    print(f"nodes: {inst.truth.p}")
    print(f"edges: {len(inst.truth.edges())}")
    return 0


def _bic_of(graph, sigma, cfg) -> float:
    dag = graph if isinstance(graph, Dag) else consistent_extension(graph)
    return total_score(dag, sigma, cfg)


def cmd_eval(args) -> int:
    learned = read_graph(args.learned)
    truth = read_graph(args.truth)
    if learned.labels != truth.labels:
        raise ParseError("node labels of the two graphs differ")
    shd = shd_cpdag(as_cpdag(learned), as_cpdag(truth))
    print(f"shd: {shd}")
    if args.data is not None:
        _, data = read_csv(args.data, header=not args.no_header)
        sigma = linalg.covariance(linalg.standardize(data))
        cfg = ScoreConfig(n=data.shape[0], lam=args.penalty)
        learned_bic = _bic_of(learned, sigma, cfg)
        truth_bic = _bic_of(truth, sigma, cfg)
        beats = learned_bic < truth_bic - score_tolerance(truth_bic)
        print(f"learned_bic: {learned_bic:.12g}")
        print(f"truth_bic: {truth_bic:.12g}")
        print(f"learned_beats_truth: {str(beats).lower()}")
    return 0


def cmd_exact(args) -> int:
    labels, data = read_csv(args.data, header=not args.no_header)
    t0 = time.perf_counter()
    dag, score = exact_mod.exact_search(data, lam=args.penalty, max_indegree=args.max_indegree)
    dag.labels = labels
    if args.out:
        write_graph(args.out, dag)
    for u, v in sorted(dag.edges()):
        print(f"{labels[u]} -> {labels[v]}")
    print(f"bic: {score:.12g}")
    print(f"wall_time_s: {time.perf_counter() - t0:.3f}")
    return 0


def _parse_algos(text):
    algos = []
    for token in text.split(","):
        name, _, rest = token.partition(":")
        if name != "ils" or not rest.isdigit():
            raise ParseError(f"malformed algo spec {token!r} (expected ils:R)")
        algos.append((token, int(rest)))
    return algos


def cmd_bench(args) -> int:
    spec = simulate.GraphSpec.parse(args.suite)
    params = simulate.AnmParams(
        noise=_parse_noise(args.noise), n=args.n, standardize=not args.raw
    )
    algos = _parse_algos(args.algos)
    rows = []
    for seed in range(args.seeds):
        inst = simulate.sample_instance(spec, params, seed)
        sigma = linalg.covariance(linalg.standardize(inst.data))
        cfg_score = ScoreConfig(n=params.n, lam=args.penalty)
        truth_bic = total_score(inst.truth, sigma, cfg_score)
        for name, restarts in algos:
            cfg = SearchConfig(restarts=restarts, seed=seed, lam=args.penalty)
            result = fit(inst.data, cfg, inst.truth.labels)
            shd = shd_cpdag(result.cpdag, inst.truth_cpdag)
            rows.append(
                {
                    "seed": seed,
                    "algo": name,
                    "shd": shd,
                    "recovered": int(shd == 0),
                    "learned_bic": f"{result.total:.12g}",
                    "truth_bic": f"{truth_bic:.12g}",
                    "wall_time_s": f"{result.wall_time_s:.3f}",
                    "restarts_executed": result.restarts_executed,
                }
            )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    recovered = sum(r["recovered"] for r in rows)
    mean_shd = sum(r["shd"] for r in rows) / len(rows)
    print(f"rows: {len(rows)}")
    print(f"recovery_fraction: {recovered / len(rows):.4f}")
    print(f"mean_shd: {mean_shd:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalorder",
        description="Order-based BIC structure learning for linear additive noise models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_fit(p):
        p.add_argument("--restarts", type=int, default=0)
        p.add_argument("--time-limit", type=float, default=None)
        p.add_argument("--penalty", type=float, default=2.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--init", choices=["greedy", "random"], default="greedy")

    p_fit = sub.add_parser("fit", help="learn a CPDAG from CSV data")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--out", required=True)
    p_fit.add_argument("--no-header", action="store_true")
    add_common_fit(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_sim = sub.add_parser("simulate", help="generate a benchmark instance")
    p_sim.add_argument("--graph", required=True, help="er:p,d | sf:p,k | path:p | file:PATH")
    p_sim.add_argument("--n", type=int, default=1000)
    p_sim.add_argument("--noise", default="gaussian:0.5,2.0")
    p_sim.add_argument("--raw", action="store_true", help="skip standardization")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-prefix", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_eval = sub.add_parser("eval", help="compare a learned graph to a target")
    p_eval.add_argument("--learned", required=True)
    p_eval.add_argument("--truth", required=True)
    p_eval.add_argument("--data", default=None)
    p_eval.add_argument("--penalty", type=float, default=2.0)
    p_eval.add_argument("--no-header", action="store_true")
    p_eval.set_defaults(func=cmd_eval)

    p_exact = sub.add_parser("exact", help="exact search by subset dynamic programming")
    p_exact.add_argument("--data", required=True)
    p_exact.add_argument("--penalty", type=float, default=2.0)
    p_exact.add_argument("--max-indegree", type=int, default=None)
    p_exact.add_argument("--out", default=None)
    p_exact.add_argument("--no-header", action="store_true")
    p_exact.set_defaults(func=cmd_exact)

    p_bench = sub.add_parser("bench", help="simulate/fit/eval over many seeds")
    p_bench.add_argument("--suite", required=True, help="graph spec, e.g. er:50,8")
    p_bench.add_argument("--n", type=int, default=1000)
    p_bench.add_argument("--noise", default="gaussian:0.5,2.0")
    p_bench.add_argument("--raw", action="store_true")
    p_bench.add_argument("--algos", default="ils:0", help="comma list of ils:R")
    p_bench.add_argument("--seeds", type=int, default=10)
    p_bench.add_argument("--penalty", type=float, default=2.0)
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooManyVariables as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ParseError, UnknownNode, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ZeroVarianceColumn, NotPositiveDefinite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CausalOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
