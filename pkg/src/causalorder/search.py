"""Order-based local search with warm-started parent selection.

The search walks the space of node orders.  For a given order, each node's
parents are selected from its prefix by a non-greedy grow-shrink that accepts
the first improving addition or removal.  Candidate orders come from
reinsertion sweeps; an outer iterated-local-search loop perturbs the best
order found so far and restarts.  Conditional variances are read off
Cholesky factors that are updated in O(k^2) per move (the "incremental"
scoring mode); a "naive" mode refactorizes from scratch at every score
evaluation and must produce identical results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, linalg
from .errors import NotPositiveDefinite
from .graph import Cpdag, Dag, dag_to_cpdag
from .linalg import EPS_PD
from .scoring import ScoreConfig, improves


class Order:
    """A permutation together with its inverse (variable -> position)."""

    __slots__ = ("seq", "pos")

    def __init__(self, seq):
        self.seq = list(seq)
        self.pos = [0] * len(self.seq)
        for i, v in enumerate(self.seq):
            self.pos[v] = i

    def swap(self, a: int, b: int) -> None:
        sa, sb = self.seq[a], self.seq[b]
        self.seq[a], self.seq[b] = sb, sa
        self.pos[sa], self.pos[sb] = b, a

    def copy(self) -> "Order":
        return Order(self.seq)

    def __len__(self):
        return len(self.seq)


@dataclass
class SearchConfig:
    restarts: int | None = 0
    time_budget: float | None = None
    swap_count: int | None = None
    seed: int = 0
    lam: float = 2.0
    init: str = "greedy"  # or "random"
    scoring: str = "incremental"  # or "naive"

    def __post_init__(self):
        if (self.restarts is None) == (self.time_budget is None):
            raise ValueError("specify exactly one of restarts / time_budget")
        if self.swap_count is not None and self.swap_count < 1:
            raise ValueError("swap_count must be >= 1")
        if self.init not in ("greedy", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.scoring not in ("incremental", "naive"):
            raise ValueError(f"unknown scoring mode {self.scoring!r}")


def _score(cfg: ScoreConfig, cv: float, n_parents: int) -> float:
    return cfg.n * math.log(cv) + cfg.lam * cfg.log_n * n_parents


class _IncrementalFitter:
    """Cholesky factor over parents + [v] (v last) with O(k^2) updates.

    Alongside the factor we carry the inverse of its parent block, so batch
    score evaluations reduce to small matrix products: additions via forward
    substitution, removals via the dropped-regressor identity
    cv_drop = cv + beta_j^2 / (Sigma_SS^{-1})_jj.  The inner loops live in
    _kernels and are jitted.
    """

    def __init__(self, sigma, v, parents):
        self.sigma = sigma
        self.v = v
        self.parents = list(parents)
        self.pset = set(self.parents)
        self.p_arr = np.array(self.parents + [v], dtype=np.int64)
        self.A, self.Linv, ok = _kernels.chol_aug(sigma, self.p_arr)
        if not ok:
            raise NotPositiveDefinite(
                f"covariance submatrix {self.parents + [v]} is not positive "
                "definite"
            )
        self._cache = None

    @property
    def cv(self) -> float:
        return float(self.A[-1, -1] ** 2)

    def eval_add_batch(self, cands):
        """Conditional variances of v after adding each candidate alone.

        Candidates that would make the submatrix numerically singular get
        +inf (they can never improve the score).
        """
        cand_arr = np.asarray(cands, dtype=np.int64)
        R, d2, t, cvs = _kernels.eval_add(
            self.sigma, self.p_arr[:-1], cand_arr, self.A, self.Linv, self.v
        )
        self._cache = (list(cands), R, d2, t, cvs)
        return cvs

    def accept_add(self, idx: int) -> None:
        cands, R, d2, t, cvs = self._cache
        u = cands[idx]
        self.A, self.Linv = _kernels.accept_add(
            self.A, self.Linv, R[:, idx].copy(), math.sqrt(d2[idx]), t[idx], cvs[idx]
        )
        self.parents.append(u)
        self.pset.add(u)
        self.p_arr = np.append(self.p_arr[:-1], (u, self.v))

    def eval_remove_batch(self):
        """Conditional variance of v after dropping each parent alone.

        Returned array is aligned with ``self.parents``.
        """
        return _kernels.eval_remove(self.A, self.Linv)

    def accept_remove(self, j: int) -> None:
        self.A, self.Linv = _kernels.accept_remove(self.A, j)
        u = self.parents.pop(j)
        self.pset.discard(u)
        self.p_arr = np.delete(self.p_arr, j)


class _NaiveFitter:
    """Same contract as _IncrementalFitter, but every evaluation performs a
    full refactorization of the covariance submatrix."""

    def __init__(self, sigma, v, parents):
        self.sigma = sigma
        self.v = v
        self.parents = list(parents)
        self.pset = set(self.parents)
        cv = self._cond(self.parents)
        if not np.isfinite(cv):
            raise NotPositiveDefinite(
                f"covariance submatrix for {v} given {self.parents} "
                "is not positive definite"
            )
        self.cv = cv

    def _cond(self, subset) -> float:
        idx = list(subset) + [self.v]
        try:
            L = np.linalg.cholesky(self.sigma[np.ix_(idx, idx)])
        except np.linalg.LinAlgError:
            return np.inf
        cv = float(L[-1, -1] ** 2)
        return cv if cv > EPS_PD else np.inf

    def eval_add_batch(self, cands):
        self._last_cands = list(cands)
        return np.array([self._cond(self.parents + [u]) for u in cands])

    def accept_add(self, idx: int) -> None:
        # idx refers to the last eval_add_batch call
        u = self._last_cands[idx]
        self.parents.append(u)
        self.pset.add(u)
        self.cv = self._cond(self.parents)

    def eval_remove_batch(self):
        return np.array(
            [
                self._cond(self.parents[:j] + self.parents[j + 1 :])
                for j in range(len(self.parents))
            ]
        )

    def accept_remove(self, j: int) -> None:
        u = self.parents.pop(j)
        self.pset.discard(u)
        self.cv = self._cond(self.parents)


class _SearchContext:
    __slots__ = ("sigma", "cfg", "scoring")

    def __init__(self, sigma, cfg: ScoreConfig, scoring: str = "incremental"):
        self.sigma = sigma
        self.cfg = cfg
        self.scoring = scoring

    def make_fitter(self, v, parents):
        cls = _IncrementalFitter if self.scoring == "incremental" else _NaiveFitter
        return cls(self.sigma, v, parents)


class SearchState:
    """An order plus per-node parent sets and local scores."""

    __slots__ = ("order", "parents", "psets", "local", "total")

    def __init__(self, order, parents, psets, local, total):
        self.order = order
        self.parents = parents  # insertion-ordered lists
        self.psets = psets
        self.local = local
        self.total = total

    @classmethod
    def cold(cls, order: Order, ctx: _SearchContext) -> "SearchState":
        p = len(order)
        state = cls(order.copy(), [[] for _ in range(p)], [set() for _ in range(p)],
                    [0.0] * p, 0.0)
        for i, v in enumerate(state.order.seq):
            grow_shrink(state, v, state.order.seq[:i], ctx, delta=None)
        return state

    def copy(self) -> "SearchState":
        return SearchState(
            self.order.copy(),
            [list(ps) for ps in self.parents],
            [set(ps) for ps in self.psets],
            list(self.local),
            self.total,
        )

    def restore(self, other: "SearchState") -> None:
        self.order = other.order.copy()
        self.parents = [list(ps) for ps in other.parents]
        self.psets = [set(ps) for ps in other.psets]
        self.local = list(other.local)
        self.total = other.total

    def set_parents(self, v, parents, local) -> None:
        self.total += local - self.local[v]
        self.parents[v] = list(parents)
        self.psets[v] = set(parents)
        self.local[v] = local

    def dag(self, labels=None) -> Dag:
        return Dag(len(self.order), [set(ps) for ps in self.psets], labels)

    def recompute_total(self) -> float:
        return float(sum(self.local))


def _grow(fitter, prefix, cfg: ScoreConfig, cur: float) -> float:
    changed = True
    while changed:
        changed = False
        cands = [u for u in prefix if u not in fitter.pset]
        i = 0
        while i < len(cands):
            batch = cands[i:]
            cvs = fitter.eval_add_batch(batch)
            pen = cfg.lam * cfg.log_n * (len(fitter.parents) + 1)
            scores = cfg.n * np.log(cvs) + pen
            tol = 1e-9 * abs(cur) + 1e-9
            hits = np.flatnonzero(scores < cur - tol)
            if hits.size == 0:
                break
            hit = int(hits[0])
            fitter.accept_add(hit)
            cur = float(scores[hit])
            changed = True
            i += hit + 1
    return cur


def _shrink(fitter, pos, cfg: ScoreConfig, cur: float) -> float:
    changed = True
    while changed:
        changed = False
        scan = sorted(fitter.parents, key=pos.__getitem__)
        i = 0
        while i < len(scan):
            cvs = fitter.eval_remove_batch()
            pen = cfg.lam * cfg.log_n * (len(fitter.parents) - 1)
            tol = 1e-9 * abs(cur) + 1e-9
            hit = -1
            for idx in range(i, len(scan)):
                j = fitter.parents.index(scan[idx])
                s = cfg.n * math.log(cvs[j]) + pen
                if s < cur - tol:
                    hit = idx
                    break
            if hit < 0:
                break
            fitter.accept_remove(j)
            cur = s
            changed = True
            i = hit + 1
    return cur


def grow_shrink(state: SearchState, v, prefix, ctx: _SearchContext, delta=None) -> None:
    """Refit ``parents[v]`` in place, warm-starting from the stored set.

    ``delta`` is ``None`` for a cold start (reset to the empty set),
    ``('+', u)`` when u just entered the prefix, ``('-', u)`` when u left it.
    """
    cfg = ctx.cfg
    if delta is not None and delta[0] == "-" and delta[1] not in state.psets[v]:
        return  # the departed node was no parent: nothing can change
    if delta is None:
        fitter = ctx.make_fitter(v, [])
        cur = _score(cfg, fitter.cv, 0)
    elif delta[0] == "+":
        u = delta[1]
        fitter = ctx.make_fitter(v, state.parents[v])
        cvs = fitter.eval_add_batch([u])
        s = _score(cfg, cvs[0], len(fitter.parents) + 1)
        if not improves(s, state.local[v]):
            return  # adding the newcomer does not help: keep previous set
        fitter.accept_add(0)
        cur = float(s)
    else:
        u = delta[1]
        fitter = ctx.make_fitter(v, [w for w in state.parents[v] if w != u])
        cur = _score(cfg, fitter.cv, len(fitter.parents))
    cur = _grow(fitter, prefix, cfg, cur)
    cur = _shrink(fitter, state.order.pos, cfg, cur)
    state.set_parents(v, fitter.parents, cur)


def reinsert(state: SearchState, v, ctx: _SearchContext) -> None:
    """Move ``v`` to its best-scoring position, in place."""
    p = len(state.order)
    if p == 1:
        return
    i = state.order.pos[v]
    base = state.copy()
    best = state.copy()
    seq = state.order.seq
    # sweep right: v gains prefix members, passed nodes lose v
    for j in range(i + 1, p):
        w = seq[j]
        state.order.swap(j - 1, j)
        grow_shrink(state, v, seq[:j], ctx, delta=("+", w))
        grow_shrink(state, w, seq[: j - 1], ctx, delta=("-", v))
        if improves(state.total, best.total):
            best = state.copy()
    state.restore(base)
    seq = state.order.seq
    # sweep left: v loses prefix members, passed nodes gain v
    for j in range(i - 1, -1, -1):
        w = seq[j]
        state.order.swap(j, j + 1)
        grow_shrink(state, v, seq[:j], ctx, delta=("-", w))
        grow_shrink(state, w, seq[: j + 1], ctx, delta=("+", v))
        if improves(state.total, best.total):
            best = state.copy()
    state.restore(best)


MAX_PASSES = 1000  # cycle guard; never expected to bind


def local_search(initial: Order, ctx: _SearchContext, trace=None) -> SearchState:
    """Cold-fit the order, then reinsertion passes until no improvement."""
    state = SearchState.cold(initial, ctx)
    if trace is not None:
        trace.append(state.total)
    for _ in range(MAX_PASSES):
        prev_total = state.total
        for v in list(state.order.seq):
            reinsert(state, v, ctx)
            if trace is not None:
                trace.append(state.total)
        if not improves(state.total, prev_total):
            break
    return state


def perturb(order: Order, k: int, rng: np.random.Generator) -> Order:
    """Apply k uniform random transpositions to a copy of the order."""
    seq = list(order.seq)
    if len(seq) >= 2:
        for _ in range(k):
            a, b = rng.choice(len(seq), size=2, replace=False)
            seq[a], seq[b] = seq[b], seq[a]
    return Order(seq)


@dataclass
class SearchOutcome:
    state: SearchState
    total: float
    restarts_executed: int
    wall_time_s: float
    traces: list = field(default_factory=list)  # one score trace per local search
    best_trace: list = field(default_factory=list)  # best total after each restart


def default_swap_count(p: int) -> int:
    return max(1, round(math.log(p))) if p > 1 else 1


def ils(sigma: np.ndarray, score_cfg: ScoreConfig, cfg: SearchConfig) -> SearchOutcome:
    """Iterated local search over orders; returns the best state seen.

    RNG streams: the seed feeds a SeedSequence whose child 0 drives the
    random initial order (when requested) and whose child r+1 drives the
    perturbation of restart r, so runs are reproducible per restart.
    """
    p = sigma.shape[0]
    ctx = _SearchContext(sigma, score_cfg, cfg.scoring)
    swap_count = cfg.swap_count if cfg.swap_count is not None else default_swap_count(p)
    ss = np.random.SeedSequence(cfg.seed)
    init_stream = ss.spawn(1)[0]

    t0 = time.perf_counter()
    if cfg.init == "random":
        rng = np.random.default_rng(init_stream)
        initial = Order(rng.permutation(p))
    elif p == 1:
        initial = Order([0])
    else:
        initial = Order(linalg.greedy_pivot_order(sigma))

    traces: list = [[]]
    best = local_search(initial, ctx, traces[0])
    best_trace = [best.total]
    executed = 0
    while True:
        if cfg.time_budget is not None:
            if time.perf_counter() - t0 >= cfg.time_budget:
                break
        elif executed >= cfg.restarts:
            break
        rng = np.random.default_rng(ss.spawn(1)[0])
        start = perturb(best.order, swap_count, rng)
        traces.append([])
        cand = local_search(start, ctx, traces[-1])
        executed += 1
        if improves(cand.total, best.total):
            best = cand
        best_trace.append(best.total)
    return SearchOutcome(
        state=best,
        total=best.total,
        restarts_executed=executed,
        wall_time_s=time.perf_counter() - t0,
        traces=traces,
        best_trace=best_trace,
    )


@dataclass
class FitResult:
    cpdag: Cpdag
    dag: Dag
    total: float
    restarts_executed: int
    wall_time_s: float


def fit(data: np.ndarray, cfg: SearchConfig, labels=None) -> FitResult:
    """Standardize, build the covariance, search, and return the CPDAG."""
    data = np.asarray(data, dtype=np.float64)
    n, p = data.shape
    std = linalg.standardize(data)
    sigma = linalg.covariance(std)
    score_cfg = ScoreConfig(n=n, lam=cfg.lam)
    outcome = ils(sigma, score_cfg, cfg)
    dag = outcome.state.dag(labels)
    return FitResult(
        cpdag=dag_to_cpdag(dag),
        dag=dag,
        total=outcome.total,
        restarts_executed=outcome.restarts_executed,
        wall_time_s=outcome.wall_time_s,
    )
