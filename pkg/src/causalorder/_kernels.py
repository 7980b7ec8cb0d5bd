"""Jitted inner loops for the incremental scoring path.

Everything here operates on an augmented lower-triangular factor A over the
variables parents + [v] (v last) together with Linv, the inverse of the
parent block A[:k, :k].  Matrices are tiny, so the point of numba is shaving
interpreter and dispatch overhead off operations that run millions of times
per search, not vectorization.
"""

import numpy as np
from numba import njit

EPS_PD = 1e-12


@njit(cache=True)
def chol_aug(sigma, idx):
    """Cholesky factor of sigma[idx, idx] plus the inverse of its leading
    (m-1) block.  ok=False signals a non-positive pivot."""
    m = idx.size
    A = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1):
            s = sigma[idx[i], idx[j]]
            for t in range(j):
                s -= A[i, t] * A[j, t]
            if i == j:
                if s <= EPS_PD:
                    return A, np.zeros((0, 0)), False
                A[i, i] = np.sqrt(s)
            else:
                A[i, j] = s / A[j, j]
    k = m - 1
    Linv = _tri_inv(A, k)
    return A, Linv, True


@njit(cache=True)
def _tri_inv(A, k):
    Linv = np.zeros((k, k))
    for j in range(k):
        Linv[j, j] = 1.0 / A[j, j]
        for i in range(j + 1, k):
            s = 0.0
            for t in range(j, i):
                s -= A[i, t] * Linv[t, j]
            Linv[i, j] = s / A[i, i]
    return Linv


@njit(cache=True)
def eval_add(sigma, parents, cands, A, Linv, v):
    """Per candidate u: the factor row it would get and the conditional
    variance of v once u joins the parents.  Singular candidates get +inf."""
    k = parents.size
    m = cands.size
    R = np.empty((k, m))
    d2 = np.empty(m)
    t = np.empty(m)
    cvs = np.empty(m)
    ell2 = A[k, k] ** 2
    for c in range(m):
        u = cands[c]
        dd = sigma[u, u]
        wv = 0.0
        for i in range(k):
            s = 0.0
            for j in range(i + 1):
                s += Linv[i, j] * sigma[parents[j], u]
            R[i, c] = s
            dd -= s * s
            wv += s * A[k, i]
        d2[c] = dd
        if dd <= EPS_PD:
            t[c] = 0.0
            cvs[c] = np.inf
            continue
        tt = (sigma[u, v] - wv) / np.sqrt(dd)
        t[c] = tt
        cv = ell2 - tt * tt
        cvs[c] = cv if cv > EPS_PD else np.inf
    return R, d2, t, cvs


@njit(cache=True)
def accept_add(A, Linv, r, d, tval, cv_new):
    k = Linv.shape[0]
    A2 = np.zeros((k + 2, k + 2))
    L2 = np.zeros((k + 1, k + 1))
    for i in range(k):
        for j in range(i + 1):
            A2[i, j] = A[i, j]
        A2[k, i] = r[i]
        A2[k + 1, i] = A[k, i]
        for j in range(i + 1):
            L2[i, j] = Linv[i, j]
    A2[k, k] = d
    A2[k + 1, k] = tval
    A2[k + 1, k + 1] = np.sqrt(cv_new)
    for j in range(k):
        s = 0.0
        for i in range(j, k):
            s += r[i] * Linv[i, j]
        L2[k, j] = -s / d
    L2[k, k] = 1.0 / d
    return A2, L2


@njit(cache=True)
def eval_remove(A, Linv):
    """Conditional variance of v after dropping each parent alone:
    cv + beta_j^2 / (Sigma_SS^{-1})_jj."""
    k = Linv.shape[0]
    cv = A[k, k] ** 2
    out = np.empty(k)
    for j in range(k):
        beta = 0.0
        pd = 0.0
        for i in range(j, k):
            beta += Linv[i, j] * A[k, i]
            pd += Linv[i, j] * Linv[i, j]
        out[j] = cv + beta * beta / pd
    return out


@njit(cache=True)
def accept_remove(A, j):
    """Drop the parent in slot j: delete its factor row, re-triangularize
    the trailing block with plane rotations, refresh the block inverse."""
    m = A.shape[0]
    M = np.zeros((m - 1, m))
    for i in range(j):
        for c in range(i + 1):
            M[i, c] = A[i, c]
    for i in range(j, m - 1):
        for c in range(i + 2):
            M[i, c] = A[i + 1, c]
    for i in range(j, m - 1):
        a = M[i, i]
        b = M[i, i + 1]
        if b != 0.0:
            rad = np.hypot(a, b)
            cth = a / rad
            sth = b / rad
            for rr in range(i, m - 1):
                x = M[rr, i]
                y = M[rr, i + 1]
                M[rr, i] = cth * x + sth * y
                M[rr, i + 1] = -sth * x + cth * y
            M[i, i + 1] = 0.0
    A2 = np.zeros((m - 1, m - 1))
    for i in range(m - 1):
        for c in range(i + 1):
            A2[i, c] = M[i, c]
    Linv = _tri_inv(A2, m - 2)
    return A2, Linv
