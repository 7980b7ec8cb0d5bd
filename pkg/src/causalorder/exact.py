"""Exact BIC optimization by dynamic programming over node subsets.

Ground-truth oracle for small instances: best parent sets per candidate
subset, then a sink sweep over all 2^p subsets.  Feasible up to p = 20.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .errors import TooManyVariables
from .graph import Dag
from .scoring import ScoreConfig

MAX_EXACT_P = 20

_DAG_COUNTS = {1: 1, 2: 3, 3: 25, 4: 543, 5: 29281}


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _compress(mask: int, v: int) -> int:
    """Drop bit v from a full mask, shifting higher bits down."""
    return (mask & ((1 << v) - 1)) | ((mask >> (v + 1)) << v)


def _expand(mask: int, v: int) -> int:
    """Inverse of _compress: reinsert a zero bit at position v."""
    low = mask & ((1 << v) - 1)
    return low | ((mask >> v) << (v + 1))


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _local_scores_for_node(sigma, v, others, cfg, max_indegree):
    """Scores of v for every subset of ``others`` (index = compressed mask)."""
    q = len(others)
    scores = np.full(1 << q, np.inf)
    for m in range(1 << q):
        size = _popcount(m)
        if max_indegree is not None and size > max_indegree:
            continue
        subset = [others[b] for b in _bits(m)]
        idx = subset + [v]
        L = np.linalg.cholesky(sigma[np.ix_(idx, idx)])
        cv = L[-1, -1] ** 2
        scores[m] = cfg.n * np.log(cv) + cfg.lam * cfg.log_n * size
    return scores


def _best_parent_tables(sigma, cfg, max_indegree):
    """Per node: best achievable score and arg subset for every candidate set.

    Entries are (score, |set|, set-mask) tuples so ties resolve to the
    smallest, lexicographically first parent set.
    """
    p = sigma.shape[0]
    tables = []
    for v in range(p):
        others = [u for u in range(p) if u != v]
        raw = _local_scores_for_node(sigma, v, others, cfg, max_indegree)
        q = len(others)
        best = [None] * (1 << q)
        best[0] = (raw[0], 0, 0)
        for m in range(1, 1 << q):
            cand = (raw[m], _popcount(m), m)
            for b in _bits(m):
                sub = best[m & ~(1 << b)]
                if sub < cand:
                    cand = sub
            best[m] = cand
        tables.append((others, best))
    return tables


def exact_search_sigma(sigma: np.ndarray, cfg: ScoreConfig, max_indegree=None):
    """Globally BIC-optimal DAG for a given covariance matrix."""
    p = sigma.shape[0]
    if p > MAX_EXACT_P:
        raise TooManyVariables(p, MAX_EXACT_P)
    tables = _best_parent_tables(sigma, cfg, max_indegree)

    full = (1 << p) - 1
    best = np.full(1 << p, np.inf)
    sink = np.full(1 << p, -1, dtype=np.int64)
    best[0] = 0.0
    order = sorted(range(1 << p), key=_popcount)
    for s in order:
        if s == 0:
            continue
        acc = np.inf
        arg = -1
        for v in _bits(s):
            rest = s & ~(1 << v)
            val = best[rest] + tables[v][1][_compress(rest, v)][0]
            if val < acc:
                acc = val
                arg = v
        best[s] = acc
        sink[s] = arg

    parents = [set() for _ in range(p)]
    s = full
    while s:
        v = int(sink[s])
        rest = s & ~(1 << v)
        _, _, pm = tables[v][1][_compress(rest, v)]
        parents[v] = set(_bits(_expand(pm, v)))
        s = rest
    return Dag(p, parents), float(best[full])


def exact_search(data: np.ndarray, lam: float = 2.0, max_indegree=None):
    """Standardize the data and run the exact subset DP."""
    data = np.asarray(data, dtype=np.float64)
    n, p = data.shape
    if p > MAX_EXACT_P:
        raise TooManyVariables(p, MAX_EXACT_P)
    sigma = linalg.covariance(linalg.standardize(data))
    return exact_search_sigma(sigma, ScoreConfig(n=n, lam=lam), max_indegree)


def enumerate_all_dags(p: int):
    """Yield every labeled DAG on p nodes exactly once (test oracle, p <= 5)."""
    if p > 5:
        raise TooManyVariables(p, 5)
    pairs = list(itertools.combinations(range(p), 2))
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        parents = [set() for _ in range(p)]
        for (u, v), st in zip(pairs, states):
            if st == 1:
                parents[v].add(u)
            elif st == 2:
                parents[u].add(v)
        if _is_acyclic(parents):
            yield Dag(p, parents)


def _is_acyclic(parents) -> bool:
    p = len(parents)
    indeg = [len(ps) for ps in parents]
    ch = [[] for _ in range(p)]
    for v in range(p):
        for u in parents[v]:
            ch[u].append(v)
    stack = [v for v in range(p) if indeg[v] == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for w in ch[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == p
