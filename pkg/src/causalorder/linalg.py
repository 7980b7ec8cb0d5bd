"""Covariance construction, standardization and incremental Cholesky factors.

All scoring in the package reduces to conditional variances, which are read
off Cholesky factors of covariance submatrices: for a factor of
``sigma[S + [v], S + [v]]`` with ``v`` last, the squared bottom-right entry is
the residual variance of ``v`` regressed on ``S``.  Factors support appending
and removing variables in O(k^2).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotPositiveDefinite, ZeroVarianceColumn

# Absolute guard on conditional variances / squared pivots, on the
# standardized (unit-diagonal) scale.
EPS_PD = 1e-12


def standardize(data: np.ndarray) -> np.ndarray:
    """Center each column and scale to maximum-likelihood unit variance.

    Raises ZeroVarianceColumn if a column is constant.
    """
    data = np.asarray(data, dtype=np.float64)
    mean = data.mean(axis=0)
    centered = data - mean
    # MLE convention: divide by n, consistent with the likelihood term.
    sd = np.sqrt((centered * centered).mean(axis=0))
    zero = np.flatnonzero(sd == 0.0)
    if zero.size:
        raise ZeroVarianceColumn(int(zero[0]))
    return centered / sd


def covariance(data: np.ndarray) -> np.ndarray:
    """Second-moment matrix (1/n) X^T X; the correlation matrix after
    standardization."""
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    sigma = data.T @ data / n
    # enforce exact symmetry; downstream code indexes both triangles
    return (sigma + sigma.T) / 2.0


class CholeskyFactor:
    """Lower-triangular factor of ``sigma[index, index]``.

    ``L[j]`` corresponds to variable ``index[j]``.  Mutating operations return
    new factors; instances are cheap to copy.
    """

    __slots__ = ("L", "index")

    def __init__(self, L: np.ndarray, index: list[int]):
        self.L = L
        self.index = index

    @classmethod
    def empty(cls) -> "CholeskyFactor":
        return cls(np.zeros((0, 0)), [])

    @classmethod
    def from_subset(cls, sigma: np.ndarray, index: list[int]) -> "CholeskyFactor":
        f = cls.empty()
        for u in index:
            f = chol_append(f, sigma, u)
        return f

    @property
    def k(self) -> int:
        return len(self.index)

    def copy(self) -> "CholeskyFactor":
        return CholeskyFactor(self.L.copy(), list(self.index))


def _solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    if L.shape[0] == 0:
        return np.zeros_like(b)
    return solve_triangular(L, b, lower=True, check_finite=False)


def chol_append(F: CholeskyFactor, sigma: np.ndarray, u: int) -> CholeskyFactor:
    """Extend the factor by variable ``u`` as the new last position."""
    if u in F.index:
        raise ValueError(f"variable {u} already in factor")
    k = F.k
    r = _solve_lower(F.L, sigma[F.index, u])
    d2 = sigma[u, u] - r @ r
    if d2 <= EPS_PD:
        raise NotPositiveDefinite(
            f"appending variable {u} gives pivot {d2:.3e}"
        )
    L = np.zeros((k + 1, k + 1))
    L[:k, :k] = F.L
    L[k, :k] = r
    L[k, k] = np.sqrt(d2)
    return CholeskyFactor(L, F.index + [u])


def chol_remove(F: CholeskyFactor, j: int) -> CholeskyFactor:
    """Delete position ``j`` and re-triangularize with plane rotations."""
    k = F.k
    if not 0 <= j < k:
        raise IndexError(j)
    M = np.delete(F.L, j, axis=0)
    retriangularize(M, j)
    return CholeskyFactor(np.ascontiguousarray(M[:, : k - 1]), F.index[:j] + F.index[j + 1 :])


def retriangularize(M: np.ndarray, j: int) -> None:
    """Zero the superdiagonal entries of rows j.. of ``M`` in place.

    ``M`` is a factor with row j deleted: rows below j carry one entry past
    the diagonal.  Givens rotations on column pairs restore triangular form;
    the final column ends up zero and can be dropped by the caller.
    """
    m = M.shape[0]
    for i in range(j, m):
        a, b = M[i, i], M[i, i + 1]
        if b == 0.0:
            continue
        rad = np.hypot(a, b)
        c, s = a / rad, b / rad
        col_a = M[i:, i].copy()
        col_b = M[i:, i + 1]
        M[i:, i] = c * col_a + s * col_b
        M[i:, i + 1] = -s * col_a + c * col_b
        M[i, i + 1] = 0.0


def conditional_variance(sigma: np.ndarray, F: CholeskyFactor, v: int) -> float:
    """Residual variance of ``v`` regressed on the factor's variables."""
    if v in F.index:
        raise ValueError(f"variable {v} is in the conditioning set")
    w = _solve_lower(F.L, sigma[F.index, v])
    cv = sigma[v, v] - w @ w
    if cv <= EPS_PD:
        raise NotPositiveDefinite(
            f"conditional variance of {v} given {F.index} is {cv:.3e}"
        )
    return float(cv)


def greedy_pivot_order(sigma: np.ndarray) -> list[int]:
    """Order variables by explainability from the already-placed ones.

    Starts with the most-correlated pair (absolute correlation on the
    standardized scale), then repeatedly appends the unplaced variable with
    the smallest residual variance given all placed variables.  Ties break
    toward the smallest variable id.  O(p^3) via a growing factor.
    """
    p = sigma.shape[0]
    if p == 1:
        return [0]
    d = np.sqrt(np.diag(sigma))
    corr = np.abs(sigma / np.outer(d, d))
    np.fill_diagonal(corr, -np.inf)
    # argmax scans row-major, so ties resolve to the lexicographically
    # smallest (i, j) pair; the lower id goes first.
    i, j = np.unravel_index(np.argmax(corr), corr.shape)
    first, second = (int(i), int(j)) if i < j else (int(j), int(i))

    order = [first, second]
    F = CholeskyFactor.from_subset(sigma, order)
    remaining = [u for u in range(p) if u not in (first, second)]
    while remaining:
        B = sigma[np.ix_(F.index, remaining)]
        W = _solve_lower(F.L, B)
        cvs = sigma[remaining, remaining] - np.einsum("ij,ij->j", W, W)
        if np.min(cvs) <= EPS_PD:
            raise NotPositiveDefinite("covariance matrix is numerically singular")
        # remaining is kept in ascending id order; argmin takes the first
        best = int(np.argmin(cvs))
        u = remaining.pop(best)
        F = chol_append(F, sigma, u)
        order.append(u)
    return order
