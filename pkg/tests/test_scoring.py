"""Local and total BIC score against closed forms and least-squares."""

import math

import numpy as np
import pytest

from causalorder import Dag, ScoreConfig, local_score, total_score
from causalorder import linalg
from causalorder.scoring import improves, score_tolerance

from conftest import ols_residual_variance


def _sigma_from(X):
    return linalg.covariance(linalg.standardize(X))


def test_empty_parent_set_closed_form(rng):
    X = rng.standard_normal((400, 3))
    sigma = _sigma_from(X)
    cfg = ScoreConfig(n=400)
    # [TRIVIAL] standardized variance is 1, so the score is exactly 0
    assert local_score(0, [], sigma, cfg) == pytest.approx(0.0, abs=1e-12)


def test_two_node_closed_form(rng):
    n = 300
    X = rng.standard_normal((n, 2))
    X[:, 1] += 0.8 * X[:, 0]
    Z = linalg.standardize(X)
    sigma = linalg.covariance(Z)
    rho = sigma[0, 1]
    lam = 2.0
    cfg = ScoreConfig(n=n, lam=lam)
    # [DERIVED] residual variance of y on x is 1 - rho^2 on the unit scale
    expected = n * math.log(1 - rho**2) + lam * math.log(n)
    assert local_score(1, [0], sigma, cfg) == pytest.approx(expected, rel=1e-12)


def test_local_score_matches_ols(rng):
    n, p = 600, 5
    X = linalg.standardize(rng.standard_normal((n, p)))
    sigma = linalg.covariance(X)
    cfg = ScoreConfig(n=n, lam=1.5)
    for _ in range(20):
        v = int(rng.integers(p))
        subset = [int(u) for u in rng.permutation(p)[: rng.integers(0, p)] if u != v]
        got = local_score(v, subset, sigma, cfg)
        want = n * math.log(ols_residual_variance(X, v, subset)) + 1.5 * math.log(
            n
        ) * len(subset)
        assert got == pytest.approx(want, rel=1e-8)


def test_penalty_monotone_in_lambda(rng):
    X = rng.standard_normal((200, 3))
    sigma = _sigma_from(X)
    scores = [
        local_score(2, [0, 1], sigma, ScoreConfig(n=200, lam=lam))
        for lam in (0.5, 1.0, 2.0, 4.0)
    ]
    assert all(a < b for a, b in zip(scores, scores[1:]))


def test_total_score_sums_locals(rng):
    X = rng.standard_normal((250, 4))
    sigma = _sigma_from(X)
    cfg = ScoreConfig(n=250)
    dag = Dag(4, [set(), {0}, {0, 1}, {2}])
    want = sum(local_score(v, dag.parents[v], sigma, cfg) for v in range(4))
    assert total_score(dag, sigma, cfg) == pytest.approx(want)


def test_covered_edge_reversal_preserves_total(rng):
    # u -> v is covered when pa(v) = pa(u) + {u}; reversing it stays in the
    # same equivalence class, so the decomposed score must not move.
    n, p = 500, 5
    X = linalg.standardize(rng.standard_normal((n, p)))
    sigma = linalg.covariance(X)
    cfg = ScoreConfig(n=n)
    hits = 0
    for _ in range(100):
        order = rng.permutation(p)
        parents = [set() for _ in range(p)]
        for i, v in enumerate(order):
            for u in order[:i]:
                if rng.random() < 0.5:
                    parents[v].add(int(u))
        dag = Dag(p, parents)
        for u, v in sorted(dag.edges()):
            if dag.parents[v] - {u} == dag.parents[u]:
                rev = [set(ps) for ps in dag.parents]
                rev[v].discard(u)
                rev[u].add(v)
                hits += 1
                assert total_score(Dag(p, rev), sigma, cfg) == pytest.approx(
                    total_score(dag, sigma, cfg), abs=1e-7
                )
    assert hits > 10  # the sweep actually exercised covered edges


def test_score_config_validation():
    with pytest.raises(ValueError):
        ScoreConfig(n=1)
    with pytest.raises(ValueError):
        ScoreConfig(n=10, lam=0.0)


def test_improvement_tolerance():
    assert improves(-10.0, 0.0)
    assert not improves(0.0, 0.0)
    # differences below the tolerance never count as improvement
    x = -12345.6789
    assert not improves(x - 0.5 * score_tolerance(x), x)
    assert improves(x - 3.0 * score_tolerance(x), x)
