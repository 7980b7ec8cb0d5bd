"""Shared fixtures and independent oracles used across the test modules."""

import numpy as np
import pytest


def random_spd(rng, p, jitter=1e-3):
    """Random symmetric positive definite matrix with unit-ish scale."""
    A = rng.standard_normal((p, p))
    M = A @ A.T / p + jitter * np.eye(p)
    d = np.sqrt(np.diag(M))
    return M / np.outer(d, d)


def ols_residual_variance(X, v, subset):
    """MLE residual variance of column v regressed on columns in subset.

    Independent oracle: plain least squares on the data matrix, no Cholesky.
    """
    y = X[:, v]
    if not subset:
        return float(np.mean((y - y.mean()) ** 2))
    Z = np.column_stack([X[:, list(subset)], np.ones(len(y))])
    beta, *_ = np.linalg.lstsq(Z, y, rcond=None)
    res = y - Z @ beta
    return float(np.mean(res**2))


def cond_var_from_sigma(sigma, v, subset):
    """Schur-complement conditional variance, computed by explicit inverse."""
    subset = list(subset)
    if not subset:
        return float(sigma[v, v])
    S = sigma[np.ix_(subset, subset)]
    b = sigma[subset, v]
    return float(sigma[v, v] - b @ np.linalg.solve(S, b))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
