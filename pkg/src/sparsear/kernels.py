"""Hot inner loops.

Each kernel exists in two builds with an identical body:

* ``<name>_py``  - plain python/numpy, always available
* ``<name>_jit`` - the same body compiled with numba (None when disabled)

The unsuffixed name is the build chosen at import time, see
:mod:`sparsear._accel`. Callers should use the unsuffixed names; the
benchmark and the cross-check tests use both builds explicitly.
"""

import types

import numpy as np

from ._accel import HAVE_NUMBA

# condition-number ceiling of X^T X for an unweighted solve
COND_LIMIT = 1e12

WEIGHT_POWER = 0
WEIGHT_MM = 1

STATUS_OK = 0
STATUS_SINGULAR = 1


def _ar_recursion(coeffs, noise, initial):
    p = coeffs.shape[0]
    n = noise.shape[0]
    x = np.zeros(p + n)
    x[:p] = initial
    for t in range(n):
        acc = noise[t]
        for k in range(p):
            acc += coeffs[k] * x[p + t - 1 - k]
        x[p + t] = acc
    return x[p:]


def _levinson(acf, order):
    """Levinson-Durbin on ``acf[0..order]``.

    Returns ``(coeffs, reflection, error)`` with ``x_t = sum_k a_k x_{t-k}``.
    """
    a = np.zeros(order)
    refl = np.zeros(order)
    err = acf[0]
    for m in range(order):
        acc = acf[m + 1]
        for k in range(m):
            acc -= a[k] * acf[m - k]
        km = acc / err
        refl[m] = km
        prev = a.copy()
        a[m] = km
        for k in range(m):
            a[k] = prev[k] - km * prev[m - 1 - k]
        err = err * (1.0 - km * km)
    return a, refl, err


def _weighted_lstsq(X, y, w, ridge):
    """Solve ``min sum w_i (y_i - X_i a)^2 + ridge |a|^2`` by sqrt-weighted QR/SVD.

    Singular when the weighted design loses numerical column rank.
    """
    n, p = X.shape
    sw = np.sqrt(w)
    if ridge > 0.0:
        A = np.zeros((n + p, p))
        b = np.zeros(n + p)
        A[:n, :] = X * sw.reshape((n, 1))
        b[:n] = y * sw
        for i in range(p):
            A[n + i, i] = np.sqrt(ridge)
    else:
        A = X * sw.reshape((n, 1))
        b = y * sw
    if A.shape[0] < p:
        return np.zeros(p), STATUS_SINGULAR
    a, _, rank, _ = np.linalg.lstsq(A, b, -1.0)
    if rank < p:
        return np.zeros(p), STATUS_SINGULAR
    return a, STATUS_OK


def _mcost(r, rho):
    r2 = r * r
    return np.sum(r2 / (rho + r2))


def _irls(X, y, a0, rho, eps, mode, q_start, q_step, q_target, tol,
          max_iter, ridge, reweight_fixed):
    """Graduated IRLS loop.

    ``reweight_fixed`` switches to the L1 weights ``1/(|r| + eps)`` and
    ignores the exponent schedule. The returned coefficients are the iterate
    with the lowest robust cost (L1: lowest absolute loss) seen so far,
    starting from ``a0`` itself.
    """
    a = a0.copy()
    r = y - X @ a
    if reweight_fixed:
        best_cost = np.sum(np.abs(r))
    else:
        best_cost = _mcost(r, rho)
    best = a.copy()
    iters = 0
    converged = False
    status = STATUS_OK
    for k in range(max_iter):
        if reweight_fixed:
            q = q_target
            w = 1.0 / (np.abs(r) + eps)
        else:
            q = min(q_target, q_start + k * q_step)
            if mode == WEIGHT_POWER:
                w = 1.0 / (rho + np.abs(r) ** q + eps)
            else:
                d = rho + r * r
                w = rho / (d * d + eps)
        a_new, status = _weighted_lstsq(X, y, w, ridge)
        if status != STATUS_OK:
            break
        iters = k + 1
        r = y - X @ a_new
        if reweight_fixed:
            cost = np.sum(np.abs(r))
        else:
            cost = _mcost(r, rho)
        if cost < best_cost:
            best_cost = cost
            best = a_new.copy()
        step = np.sqrt(np.sum((a_new - a) ** 2)) / max(1.0, np.sqrt(np.sum(a * a)))
        a = a_new
        if q >= q_target and step < tol:
            converged = True
            break
    return best, a, iters, converged, status


def _l0_scan(X, y, subsets, tol):
    """Score every exactly-determined row subset.

    Returns per-subset satisfied counts (-1 when the subset is singular),
    residual 2-norms and coefficient vectors.
    """
    m = subsets.shape[0]
    p = X.shape[1]
    counts = np.full(m, -1, dtype=np.int64)
    norms = np.full(m, np.inf)
    coeffs = np.zeros((m, p))
    for i in range(m):
        A = np.empty((p, p))
        b = np.empty(p)
        for j in range(p):
            A[j, :] = X[subsets[i, j], :]
            b[j] = y[subsets[i, j]]
        s = np.linalg.svd(A)[1]
        if not (s[p - 1] > 1e-12 * s[0]):
            continue
        a = np.linalg.solve(A, b)
        r = y - X @ a
        counts[i] = np.sum(np.abs(r) <= tol)
        norms[i] = np.sqrt(np.sum(r * r))
        coeffs[i, :] = a
    return counts, norms, coeffs


def _basis_inverse(X, basis):
    p = basis.shape[0]
    A = np.empty((p, p))
    for j in range(p):
        A[j, :] = X[basis[j], :]
    s = np.linalg.svd(A)[1]
    if not (s[p - 1] > 1e-12 * s[0]):
        return A, False
    return np.ascontiguousarray(np.linalg.inv(A)), True


def _l1_exchange(X, y, basis, max_sweeps):
    """Vertex descent for least absolute deviations.

    ``basis`` holds ``p`` row indices whose equations are met exactly.
    Releasing basis row ``j`` moves the solution along column ``j`` of the
    basis inverse; the candidate vertices on that edge are where another
    row's residual reaches zero. The best improving candidate is swapped in
    (one simplex pivot). The L1 cost is convex and its directional
    derivative at a vertex separates over these edges, so a vertex with no
    improving pivot is a global minimizer.

    Returns ``(coeffs, basis, sweeps, ok)``.
    """
    n = X.shape[0]
    p = basis.shape[0]
    basis = basis.copy()
    Binv, ok = _basis_inverse(X, basis)
    if not ok:
        return np.zeros(p), basis, 0, False
    yb = np.empty(p)
    for j in range(p):
        yb[j] = y[basis[j]]
    a = Binv @ yb
    r = y - X @ a
    cost = np.sum(np.abs(r))
    inside = np.zeros(n, dtype=np.bool_)
    for j in range(p):
        inside[basis[j]] = True
    sweeps = 0
    improved = True
    while improved and sweeps < max_sweeps:
        improved = False
        sweeps += 1
        for j in range(p):
            g = X @ np.ascontiguousarray(Binv[:, j])
            scale = np.max(np.abs(g))
            best_c = cost * (1.0 - 1e-13)
            best_i = -1
            for i in range(n):
                if inside[i] or not (abs(g[i]) > 1e-10 * scale):
                    continue
                t = r[i] / g[i]
                c = np.sum(np.abs(r - t * g))
                if c < best_c:
                    best_c = c
                    best_i = i
            if best_i < 0:
                continue
            old = basis[j]
            basis[j] = best_i
            Bn, good = _basis_inverse(X, basis)
            if not good:
                basis[j] = old
                continue
            Binv = Bn
            inside[old] = False
            inside[best_i] = True
            for k in range(p):
                yb[k] = y[basis[k]]
            a = Binv @ yb
            r = y - X @ a
            cost = np.sum(np.abs(r))
            improved = True
    return a, basis, sweeps, True


ar_recursion_py = _ar_recursion
levinson_py = _levinson
weighted_lstsq_py = _weighted_lstsq
irls_py = _irls
l0_scan_py = _l0_scan
l1_exchange_py = _l1_exchange

if HAVE_NUMBA:
    from numba import njit as _njit

    ar_recursion_jit = _njit(cache=True)(_ar_recursion)
    levinson_jit = _njit(cache=True)(_levinson)
    weighted_lstsq_jit = _njit(cache=True)(_weighted_lstsq)
    _mcost_jit = _njit(cache=True)(_mcost)

    def _rebind(func, **overrides):
        # same code object, globals pointing at compiled helpers
        env = dict(func.__globals__)
        env.update(overrides)
        return types.FunctionType(func.__code__, env, func.__name__,
                                  func.__defaults__, func.__closure__)

    irls_jit = _njit(cache=True)(_rebind(
        _irls,
        _weighted_lstsq=weighted_lstsq_jit,
        _mcost=_mcost_jit,
    ))
    l0_scan_jit = _njit(cache=True)(_l0_scan)
    _basis_inverse_jit = _njit(cache=True)(_basis_inverse)
    l1_exchange_jit = _njit(cache=True)(_rebind(_l1_exchange, _basis_inverse=_basis_inverse_jit))

    ar_recursion = ar_recursion_jit
    levinson = levinson_jit
    weighted_lstsq = weighted_lstsq_jit
    irls = irls_jit
    l0_scan = l0_scan_jit
    l1_exchange = l1_exchange_jit
else:
    ar_recursion_jit = levinson_jit = weighted_lstsq_jit = None
    irls_jit = l0_scan_jit = l1_exchange_jit = None

    ar_recursion = ar_recursion_py
    levinson = levinson_py
    weighted_lstsq = weighted_lstsq_py
    irls = irls_py
    l0_scan = l0_scan_py
    l1_exchange = l1_exchange_py


def backend():
    """Name of the active kernel build, ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA else "numpy"
