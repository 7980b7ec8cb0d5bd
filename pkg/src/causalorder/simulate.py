"""Benchmark instance generation: random graphs and linear ANM sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ParseError
from .graph import Cpdag, Dag, dag_to_cpdag, read_edge_list


@dataclass
class GraphSpec:
    kind: str  # "er", "sf", "path" or "file"
    p: int = 0
    avg_degree: float = 0.0  # er
    attach: int = 1  # sf
    path: str | None = None  # file

    @classmethod
    def parse(cls, text: str) -> "GraphSpec":
        """Parse CLI-style specs: er:p,d  sf:p,k  path:p  file:PATH."""
        kind, _, rest = text.partition(":")
        try:
            if kind == "er":
                p, d = rest.split(",")
                return cls("er", p=int(p), avg_degree=float(d))
            if kind == "sf":
                p, k = rest.split(",")
                return cls("sf", p=int(p), attach=int(k))
            if kind == "path":
                return cls("path", p=int(rest))
            if kind == "file":
                return cls("file", path=rest)
        except ValueError as exc:
            raise ParseError(f"malformed graph spec {text!r}") from exc
        raise ParseError(f"unknown graph kind {kind!r}")


@dataclass
class AnmParams:
    weight_low: float = 0.25
    weight_high: float = 1.0
    noise: tuple = ("gaussian", 0.5, 2.0)  # or ("uniform", a, b)
    n: int = 1000
    standardize: bool = True

    def __post_init__(self):
        if not 0 < self.weight_low < self.weight_high:
            raise ValueError("need 0 < weight_low < weight_high")
        if self.noise[0] not in ("gaussian", "uniform"):
            raise ValueError(f"unknown noise kind {self.noise[0]!r}")
        if self.n < 2:
            raise ValueError("need at least 2 samples")


@dataclass
class AnmInstance:
    truth: Dag
    truth_cpdag: Cpdag
    weights: np.ndarray
    data: np.ndarray
    seed: int


def _er_skeleton(p, avg_degree, rng):
    edges = []
    if p < 2:
        return edges
    prob = min(1.0, avg_degree / (p - 1))
    for u in range(p):
        for v in range(u + 1, p):
            if rng.random() < prob:
                edges.append((u, v))
    return edges


def _sf_skeleton(p, k, rng):
    """Star seed on k+1 nodes, then degree-proportional attachment of each
    new node to k distinct existing nodes."""
    seed_size = min(k + 1, p)
    edges = [(0, v) for v in range(1, seed_size)]
    degree = np.zeros(p)
    degree[0] = seed_size - 1
    degree[1:seed_size] = 1
    for v in range(seed_size, p):
        weights = degree[:v] / degree[:v].sum()
        targets = rng.choice(v, size=min(k, v), replace=False, p=weights)
        for u in targets:
            edges.append((int(u), v))
            degree[u] += 1
        degree[v] = min(k, v)
    return edges


def generate_graph(spec: GraphSpec, rng: np.random.Generator) -> Dag:
    """Draw the requested skeleton and orient it by a uniform random order.

    Graphs read from file keep their stored orientation.
    """
    if spec.kind == "file":
        return read_edge_list(spec.path)
    p = spec.p
    if spec.kind == "er":
        skeleton = _er_skeleton(p, spec.avg_degree, rng)
    elif spec.kind == "sf":
        skeleton = _sf_skeleton(p, spec.attach, rng)
    elif spec.kind == "path":
        skeleton = [(i, i + 1) for i in range(p - 1)]
    else:
        raise ParseError(f"unknown graph kind {spec.kind!r}")
    perm = rng.permutation(p)
    rank = np.empty(p, dtype=np.int64)
    rank[perm] = np.arange(p)
    parents = [set() for _ in range(p)]
    for u, v in skeleton:
        if rank[u] < rank[v]:
            parents[v].add(u)
        else:
            parents[u].add(v)
    return Dag(p, parents)


def sample_instance(spec: GraphSpec, params: AnmParams, seed: int) -> AnmInstance:
    """Draw a ground-truth DAG, weights, and data; optionally standardize.

    Substreams in fixed order (graph, weights, noise scales, data) keep the
    instance reproducible from the seed alone.
    """
    ss = np.random.SeedSequence(seed)
    rng_graph, rng_weights, rng_scales, rng_data = (
        np.random.default_rng(child) for child in ss.spawn(4)
    )
    truth = generate_graph(spec, rng_graph)
    p = truth.p

    W = np.zeros((p, p))
    for u, v in sorted(truth.edges()):
        magnitude = rng_weights.uniform(params.weight_low, params.weight_high)
        sign = 1.0 if rng_weights.random() < 0.5 else -1.0
        W[u, v] = sign * magnitude

    n = params.n
    kind, a, b = params.noise
    if kind == "gaussian":
        sd = np.sqrt(rng_scales.uniform(a, b, size=p))
        noise = rng_data.standard_normal((n, p)) * sd
    else:
        noise = rng_data.uniform(a, b, size=(n, p))

    X = np.zeros((n, p))
    for v in truth.topological_order():
        ps = sorted(truth.parents[v])
        X[:, v] = noise[:, v]
        if ps:
            X[:, v] += X[:, ps] @ W[ps, v]
    if params.standardize:
        X = linalg.standardize(X)
    return AnmInstance(
        truth=truth,
        truth_cpdag=dag_to_cpdag(truth),
        weights=W,
        data=X,
        seed=seed,
    )
