"""Hot loops with numba and pure numpy implementations.

``nnls_batch`` and ``hit_and_run_chains`` dispatch on :data:`USE_NUMBA`.
Both implementations consume the same inputs (random numbers are drawn by
the caller), so switching paths changes results only at rounding level.
"""
from __future__ import annotations

import itertools

import numpy as np

from ._accel import USE_NUMBA, njit

MAX_SUBSET_ENUM = 4096


# ---------------------------------------------------------------------------
# nonnegative least squares


@njit
def _solve_spd(G, rhs, idx, k):
    """Cholesky solve of ``G[idx, idx] s = rhs[idx]``; NaN when singular."""
    L = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1):
            acc = G[idx[i], idx[j]]
            for p in range(j):
                acc -= L[i, p] * L[j, p]
            if i == j:
                if acc <= 1e-14 * (1.0 + G[idx[i], idx[i]]):
                    return np.full(k, np.nan)
                L[i, i] = np.sqrt(acc)
            else:
                L[i, j] = acc / L[j, j]
    y = np.empty(k)
    for i in range(k):
        acc = rhs[idx[i]]
        for p in range(i):
            acc -= L[i, p] * y[p]
        y[i] = acc / L[i, i]
    s = np.empty(k)
    for i in range(k - 1, -1, -1):
        acc = y[i]
        for p in range(i + 1, k):
            acc -= L[p, i] * s[p]
        s[i] = acc / L[i, i]
    return s


@njit
def _nnls_gram(G, Atb, tol):
    """Lawson-Hanson active set NNLS on the normal equations.

    ``G = A^T A`` and ``Atb = A^T b``.  Ties in the entering variable go to
    the lowest index.  A candidate column that would make the passive Gram
    block singular is skipped (it lies in the span of the passive set, so
    its gradient entry vanishes at the subproblem optimum anyway).
    """
    n = G.shape[0]
    x = np.zeros(n)
    passive = np.zeros(n, dtype=np.bool_)
    blocked = np.zeros(n, dtype=np.bool_)
    w = Atb.copy()
    it = 0
    max_it = 3 * n + 10
    idx = np.empty(n, dtype=np.int64)
    while it < max_it:
        jmax = -1
        wmax = tol
        for j in range(n):
            if not passive[j] and not blocked[j] and w[j] > wmax:
                wmax = w[j]
                jmax = j
        if jmax < 0:
            break
        passive[jmax] = True
        entered = jmax
        while True:
            it += 1
            k = 0
            for j in range(n):
                if passive[j]:
                    idx[k] = j
                    k += 1
            sp = _solve_spd(G, Atb, idx, k)
            if np.isnan(sp[0]):
                passive[entered] = False
                blocked[entered] = True
                break
            entered = -1
            s = np.zeros(n)
            ok = True
            for c in range(k):
                s[idx[c]] = sp[c]
                if sp[c] <= 0.0:
                    ok = False
            if ok or it >= max_it:
                for j in range(n):
                    x[j] = s[j]
                break
            alpha = 1.0
            for c in range(k):
                j = idx[c]
                if s[j] <= 0.0:
                    a = x[j] / (x[j] - s[j])
                    if a < alpha:
                        alpha = a
            for j in range(n):
                x[j] = x[j] + alpha * (s[j] - x[j])
                if passive[j] and x[j] <= tol:
                    passive[j] = False
                    x[j] = 0.0
        for j in range(n):
            acc = Atb[j]
            for p in range(n):
                acc -= G[j, p] * x[p]
            w[j] = acc
            if passive[j]:
                blocked[j] = False
    for j in range(n):
        if x[j] < 0.0:
            x[j] = 0.0
    return x


@njit
def _nnls_single(A, b, tol):
    G = A.T @ A
    x = _nnls_gram(G, A.T @ b, tol)
    r = b - A @ x
    return x, np.sqrt(np.sum(r * r))


@njit(nogil=True)
def _nnls_batch_numba(A, B, tol):
    N = B.shape[0]
    n = A.shape[1]
    G = A.T @ A
    AtB = B @ A
    X = np.zeros((N, n))
    res = np.zeros(N)
    for i in range(N):
        x = _nnls_gram(G, AtB[i], tol)
        X[i] = x
        acc = 0.0
        for r in range(A.shape[0]):
            v = B[i, r]
            for p in range(n):
                v -= A[r, p] * x[p]
            acc += v * v
        res[i] = np.sqrt(acc)
    return X, res


def _nnls_batch_enum(A, B):
    """Exact NNLS by scanning every column subset.

    The optimum is the unconstrained least squares solution on its own
    support, so the best feasible subset solution is optimal.
    """
    m, n = A.shape
    N = B.shape[0]
    best_res = np.sqrt(np.einsum("ij,ij->i", B, B))
    best_x = np.zeros((N, n))
    for k in range(1, n + 1):
        for sub in itertools.combinations(range(n), k):
            As = A[:, sub]
            pinv = np.linalg.pinv(As)
            xs = B @ pinv.T
            feas = np.all(xs >= 0.0, axis=1)
            if not feas.any():
                continue
            r = B - xs @ As.T
            res = np.sqrt(np.einsum("ij,ij->i", r, r))
            better = feas & (res < best_res - 1e-15)
            if better.any():
                best_res[better] = res[better]
                bx = np.zeros((int(better.sum()), n))
                bx[:, list(sub)] = xs[better]
                best_x[better] = bx
    return best_x, best_res


def nnls_tol(A, b_scale: float) -> float:
    return 1e-12 * (1.0 + np.linalg.norm(A, 1) * b_scale)


def nnls(A, b, tol: float | None = None):
    """Solve ``min ||A x - b||_2`` subject to ``x >= 0``.

    Returns
    -------
    x : ndarray
    residual : float
        Euclidean norm of ``A x - b``.
    """
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if tol is None:
        tol = nnls_tol(A, np.linalg.norm(b))
    x, r = _nnls_single(A, b, tol)
    x = np.asarray(x)
    # polish on the support with an orthogonal solver; the normal equations
    # square the condition number
    S = np.flatnonzero(x > 0)
    if S.size:
        xs = np.linalg.lstsq(A[:, S], b, rcond=None)[0]
        if np.all(xs > 0):
            x = np.zeros_like(x)
            x[S] = xs
            r = float(np.linalg.norm(A @ x - b))
    return x, float(r)


def nnls_batch(A, B, tol: float | None = None, use_numba: bool | None = None):
    """Row-wise NNLS for every right-hand side in ``B`` (shape ``(N, m)``).

    Returns
    -------
    X : ndarray, shape (N, n)
    residual : ndarray, shape (N,)
    """
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    if use_numba is None:
        use_numba = USE_NUMBA
    if tol is None:
        tol = nnls_tol(A, float(np.abs(B).max(initial=0.0)) * np.sqrt(A.shape[0]))
    if use_numba:
        return _nnls_batch_numba(A, B, tol)
    if 2 ** A.shape[1] <= MAX_SUBSET_ENUM:
        return _nnls_batch_enum(A, B)
    X = np.zeros((B.shape[0], A.shape[1]))
    res = np.zeros(B.shape[0])
    for i in range(B.shape[0]):
        X[i], res[i] = _nnls_single(A, B[i], tol)
    return X, res


# ---------------------------------------------------------------------------
# hit-and-run


@njit(nogil=True)
def _har_numba(H, c, X0, dirs, us, thin):
    K, D = X0.shape
    steps = dirs.shape[0]
    X = X0.copy()
    out = np.empty(((steps // thin), K, D))
    k = 0
    for s in range(steps):
        for i in range(K):
            d = dirs[s, i]
            nrm = np.sqrt(np.sum(d * d))
            d = d / nrm
            lo = -np.inf
            hi = np.inf
            for f in range(H.shape[0]):
                a = 0.0
                hx = 0.0
                for j in range(D):
                    a += H[f, j] * d[j]
                    hx += H[f, j] * X[i, j]
                sl = c[f] - hx
                if a > 1e-14:
                    v = sl / a
                    if v < hi:
                        hi = v
                elif a < -1e-14:
                    v = sl / a
                    if v > lo:
                        lo = v
            step = lo + us[s, i] * (hi - lo)
            for j in range(D):
                X[i, j] += step * d[j]
        if (s + 1) % thin == 0:
            out[k] = X
            k += 1
    return out


def _har_numpy(H, c, X0, dirs, us, thin):
    X = X0.copy()
    out = []
    for s in range(dirs.shape[0]):
        d = dirs[s] / np.linalg.norm(dirs[s], axis=1, keepdims=True)
        a = d @ H.T
        sl = c[None, :] - X @ H.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = sl / a
        hi = np.where(a > 1e-14, ratio, np.inf).min(axis=1)
        lo = np.where(a < -1e-14, ratio, -np.inf).max(axis=1)
        X = X + (lo + us[s] * (hi - lo))[:, None] * d
        if (s + 1) % thin == 0:
            out.append(X.copy())
    return np.array(out).reshape(len(out), *X0.shape)


def hit_and_run_chains(H, c, X0, dirs, us, thin=1, use_numba=None):
    """Advance ``K`` independent hit-and-run chains inside ``{x : H x <= c}``.

    Parameters
    ----------
    H, c : ndarray
        Halfspace description.
    X0 : ndarray, shape (K, D)
        Interior starting points.
    dirs : ndarray, shape (steps, K, D)
        Gaussian direction draws.
    us : ndarray, shape (steps, K)
        Uniform draws on [0, 1).
    thin : int
        Keep every ``thin``-th state.

    Returns
    -------
    ndarray, shape (steps // thin, K, D)
    """
    if use_numba is None:
        use_numba = USE_NUMBA
    args = (np.ascontiguousarray(H, float), np.ascontiguousarray(c, float),
            np.ascontiguousarray(X0, float), np.ascontiguousarray(dirs, float),
            np.ascontiguousarray(us, float), int(thin))
    if use_numba:
        return _har_numba(*args)
    return _har_numpy(*args)
