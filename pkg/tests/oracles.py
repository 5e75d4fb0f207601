"""Independent reference implementations used by the tests.

These deliberately avoid the package's kernels: plain loops, dense
enumeration and scipy routines only.
"""

import itertools

import numpy as np
from scipy.linalg import solve_toeplitz


def ols_pinv(X, y):
    return np.linalg.pinv(X) @ y


def yule_walker_toeplitz(x, order):
    n = len(x)
    acf = np.array([np.dot(x[: n - k], x[k:]) / n for k in range(order + 1)])
    return solve_toeplitz(acf[:order], acf[1: order + 1])


def l1_vertex(X, y):
    """Lowest-L1 exact solve over all ``p``-row subsets."""
    n, p = X.shape
    best, best_cost = None, np.inf
    for rows in itertools.combinations(range(n), p):
        A = X[list(rows)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        a = np.linalg.solve(A, y[list(rows)])
        cost = np.abs(y - X @ a).sum()
        if cost < best_cost - 1e-12:
            best, best_cost = a, cost
    return best, best_cost


def l0_enumerate(X, y, tol):
    """Max satisfied count over exact ``p``-row solves; ties by lowest 2-norm."""
    n, p = X.shape
    best = None
    for rows in itertools.combinations(range(n), p):
        A = X[list(rows)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        a = np.linalg.solve(A, y[list(rows)])
        r = y - X @ a
        key = (-(np.abs(r) <= tol).sum(), np.linalg.norm(r))
        if best is None or key < best[0]:
            best = (key, a)
    return best[1], -best[0][0]


def mcost_grid(x, y, rho, lo=-1.5, hi=1.5, step=1e-4):
    """Dense grid minimizer of ``sum r^2/(rho + r^2)`` for one coefficient."""
    grid = np.arange(lo, hi + step / 2, step)
    r = y[None, :] - grid[:, None] * x[None, :]
    r2 = r * r
    cost = (r2 / (rho + r2)).sum(axis=1)
    return grid[np.argmin(cost)]
