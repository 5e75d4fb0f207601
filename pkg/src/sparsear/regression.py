"""AR regression system and its estimators.

All fits work on the backward layout ``x_t = sum_k a_k x_{t-k} + r_t`` with
no intercept. The robust estimator minimizes the bounded cost
``sum r_i^2 / (rho + r_i^2)`` by iteratively re-weighted least squares whose
weight exponent is annealed from 0 (all weights equal, plain least squares)
up to 2.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .errors import (
    DegenerateSignal,
    InvalidConfig,
    InvalidOrder,
    NonConvergence,
    OrderTooLarge,
    SingularSystem,
    TooLarge,
)

MAD_TO_SIGMA = 1.4826

L0_MAX_ROWS = 16
L0_MAX_ORDER = 3

METHODS = ("ols", "yule_walker", "l1", "robust")
WEIGHT_MODES = {"power": kernels.WEIGHT_POWER, "mm": kernels.WEIGHT_MM}


@dataclass(frozen=True, eq=False)
class DesignSystem:
    """Regression pair of the backward AR equation.

    Row ``j`` of ``design`` holds ``[x[p-1+j], x[p-2+j], ..., x[j]]`` and
    ``target[j] == x[p+j]``.
    """

    design: np.ndarray
    target: np.ndarray
    order: int

    @property
    def rows(self):
        return self.target.shape[0]


@dataclass(frozen=True, eq=False)
class ARModel:
    order: int
    coeffs: np.ndarray
    residual: np.ndarray
    residual_variance: float
    method: str
    iterations: int = 0
    converged: bool = True
    rho: float | None = None
    reflection: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self):
        out = {
            "method": self.method,
            "order": self.order,
            "coeffs": [float(c) for c in self.coeffs],
            "residual_variance": float(self.residual_variance),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }
        if self.rho is not None:
            out["rho"] = float(self.rho)
        return out


@dataclass(frozen=True)
class RobustConfig:
    """Settings for :func:`robust_fit` and :func:`l1_fit`.

    ``rho="auto"`` sets ``rho = (2 * sigma)^2`` with ``sigma`` the MAD scale
    of the least-squares residual. ``weight_mode="power"`` re-weights with
    ``1/(rho + |r|^q + epsilon)`` for the annealed exponent ``q``;
    ``"mm"`` uses the majorize-minimize weight ``rho/(rho + r^2)^2`` of the
    bounded cost itself.
    """

    rho: float | str = "auto"
    epsilon: float = 1e-12
    gnc_start: float = 0.0
    gnc_step: float = 0.25
    gnc_target: float = 2.0
    tol: float = 1e-8
    max_iter: int = 100
    weight_mode: str = "power"
    ridge: float = 0.0

    def __post_init__(self):
        if self.rho != "auto":
            if isinstance(self.rho, str) or not float(self.rho) > 0:
                raise InvalidConfig("rho must be positive or 'auto'")
        if not self.epsilon > 0:
            raise InvalidConfig("epsilon must be positive")
        if self.gnc_target != 2.0:
            raise InvalidConfig("gnc_target is fixed at 2")
        if not 0.0 <= self.gnc_start <= self.gnc_target:
            raise InvalidConfig("gnc_start must lie in [0, 2]")
        if not self.gnc_step > 0:
            raise InvalidConfig("gnc_step must be positive")
        if not self.tol > 0:
            raise InvalidConfig("tol must be positive")
        if int(self.max_iter) < 1:
            raise InvalidConfig("max_iter must be >= 1")
        if self.weight_mode not in WEIGHT_MODES:
            raise InvalidConfig(f"weight_mode must be one of {sorted(WEIGHT_MODES)}")
        if self.ridge < 0:
            raise InvalidConfig("ridge must be non-negative")


def _lagged(samples, order):
    windows = sliding_window_view(samples, order + 1)
    design = np.ascontiguousarray(windows[:, -2::-1] if order > 0 else windows[:, :0])
    target = np.ascontiguousarray(windows[:, -1])
    return design, target


def build_design(series, order):
    """Stack the lagged samples of ``series`` into a :class:`DesignSystem`."""
    if order < 1:
        raise InvalidOrder(f"order must be >= 1, got {order}")
    x = series.samples if hasattr(series, "samples") else np.asarray(series, dtype=float)
    n = x.shape[0]
    if n < 2 * order + 1:
        raise OrderTooLarge(f"need at least {2 * order + 1} samples for order {order}, got {n}")
    design, target = _lagged(x, order)
    return DesignSystem(design, target, int(order))


def _model(system, coeffs, method, **extra):
    residual = system.target - system.design @ coeffs
    return ARModel(
        order=system.order,
        coeffs=coeffs,
        residual=residual,
        residual_variance=float(np.mean(residual ** 2)),
        method=method,
        **extra,
    )


def _solve(design, target, weights, ridge=0.0):
    a, status = kernels.weighted_lstsq(design, target, weights, float(ridge))
    if status != kernels.STATUS_OK:
        raise SingularSystem("weighted design matrix is rank deficient")
    return a


def ols_fit(system):
    """Least-squares AR fit.

    Raises :class:`SingularSystem` when ``cond(X^T X)`` exceeds 1e12.
    """
    X = system.design
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] == 0 or (s[0] / s[-1]) ** 2 > kernels.COND_LIMIT:
        raise SingularSystem("X^T X is numerically singular")
    a = _solve(X, system.target, np.ones(system.rows))
    return _model(system, a, "ols")


def weighted_ls_solve(system, weights):
    """Coefficients minimizing ``sum w_i (x_i - X_i a)^2``."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != system.rows:
        raise ValueError(f"expected {system.rows} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and non-negative")
    return _solve(system.design, system.target, w)


def autocorrelation(samples, maxlag, demean=False):
    """Biased autocorrelation ``sum_t x_t x_{t+k} / N`` for ``k = 0..maxlag``."""
    x = np.asarray(samples, dtype=float)
    if demean:
        x = x - x.mean()
    n = x.shape[0]
    return np.array([np.dot(x[: n - k], x[k:]) / n for k in range(maxlag + 1)])


def yule_walker_fit(series, order, demean=False):
    """Yule-Walker AR fit via Levinson-Durbin on the biased autocorrelation.

    The residual is the one-step prediction error over ``t = p..N-1``.
    """
    if order < 1:
        raise InvalidOrder(f"order must be >= 1, got {order}")
    x = series.samples
    if x.shape[0] <= order:
        raise OrderTooLarge(f"series of length {x.shape[0]} too short for order {order}")
    acf = autocorrelation(x, order, demean=demean)
    if acf[0] == 0:
        raise DegenerateSignal("zero autocorrelation at lag 0")
    a, refl, _ = kernels.levinson(acf, int(order))
    if demean:
        x = x - x.mean()
    design, target = _lagged(x, order)
    return _model(DesignSystem(design, target, int(order)), a, "yule_walker",
                  reflection=refl)


def mcost(residual, rho):
    """Bounded robust cost ``sum r_i^2 / (rho + r_i^2)``; each term is below 1."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    r = np.asarray(residual, dtype=float)
    r2 = r * r
    return float(np.sum(r2 / (rho + r2)))


def estimate_scale(residual):
    """MAD scale ``1.4826 * median(|r - median(r)|)``."""
    r = np.asarray(residual, dtype=float)
    if r.size == 0:
        raise ValueError("empty residual")
    return float(MAD_TO_SIGMA * np.median(np.abs(r - np.median(r))))


def resolve_rho(config, ols_residual):
    if config.rho != "auto":
        return float(config.rho)
    sigma = estimate_scale(ols_residual)
    # exact fits give a zero MAD; fall back to epsilon to keep rho positive
    return max((2.0 * sigma) ** 2, config.epsilon)


def _run_irls(system, config, a0, rho, l1):
    best, last, iters, converged, status = kernels.irls(
        system.design, system.target, a0, float(rho), float(config.epsilon),
        WEIGHT_MODES[config.weight_mode], float(config.gnc_start),
        float(config.gnc_step), float(config.gnc_target), float(config.tol),
        int(config.max_iter), float(config.ridge), bool(l1))
    if status != kernels.STATUS_OK:
        raise SingularSystem("weighted design matrix became rank deficient during IRLS")
    return best, iters, converged


def robust_fit(system, config=None):
    """Sparse-residual AR fit by graduated IRLS.

    Starts from the least-squares solution. At iteration ``k`` the weight
    exponent is ``min(2, gnc_start + k * gnc_step)``; the loop stops once the
    exponent has reached 2 and the relative coefficient step drops below
    ``tol``. The iterate with the lowest bounded cost is returned, so the
    result never scores worse than least squares.
    """
    config = config or RobustConfig()
    a0 = ols_fit(system).coeffs
    rho = resolve_rho(config, system.target - system.design @ a0)
    best, iters, converged = _run_irls(system, config, a0, rho, l1=False)
    if not converged:
        warnings.warn(
            f"robust_fit hit max_iter={config.max_iter} without meeting tol={config.tol}",
            NonConvergence, stacklevel=2)
    return _model(system, best, "robust", iterations=iters, converged=converged, rho=rho)


L1_MAX_SWEEPS = 1000


def _vertex_polish(system, a):
    """Finish an approximate L1 solution with exact vertex exchanges.

    The start vertex is a well-conditioned set of ``p`` rows with the
    smallest residuals at ``a``.
    """
    X, y, p = system.design, system.target, system.order
    order = np.argsort(np.abs(y - X @ a), kind="stable")
    basis = []
    for i in order:
        trial = basis + [int(i)]
        s = np.linalg.svd(X[trial], compute_uv=False)
        if s[-1] > 1e-10 * s[0]:
            basis = trial
        if len(basis) == p:
            break
    if len(basis) < p:
        return a
    cand, _, _, ok = kernels.l1_exchange(X, y, np.array(basis, dtype=np.int64), L1_MAX_SWEEPS)
    if ok and np.sum(np.abs(y - X @ cand)) <= np.sum(np.abs(y - X @ a)):
        return cand
    return a


def l1_fit(system, config=None):
    """Least-absolute-deviation AR fit by IRLS with weights ``1/(|r| + eps)``.

    The IRLS iterate seeds an exact vertex-exchange descent, whose result
    is kept when it does not raise the absolute loss.
    """
    config = config or RobustConfig()
    a0 = ols_fit(system).coeffs
    best, iters, converged = _run_irls(system, config, a0, 1.0, l1=True)
    best = _vertex_polish(system, best)
    if not converged:
        warnings.warn(
            f"l1_fit hit max_iter={config.max_iter} without meeting tol={config.tol}",
            NonConvergence, stacklevel=2)
    return _model(system, best, "l1", iterations=iters, converged=converged)


def l0_bruteforce(system, tol):
    """Exhaustive search for the coefficients satisfying the most equations.

    Every ``order``-row subset with an invertible subsystem is solved
    exactly and scored by how many rows it satisfies within ``tol``. Ties go
    to the smallest residual 2-norm, then to the first subset.

    Returns
    -------
    coeffs : ndarray
    satisfied_count : int
    """
    rows, p = system.design.shape
    if rows < p:
        raise OrderTooLarge(f"{rows} rows cannot determine {p} coefficients")
    if rows > L0_MAX_ROWS or p > L0_MAX_ORDER:
        raise TooLarge(
            f"brute force limited to {L0_MAX_ROWS} rows and order {L0_MAX_ORDER}, "
            f"got {rows} rows and order {p}")
    subsets = np.array(list(itertools.combinations(range(rows), p)), dtype=np.int64)
    counts, norms, coeffs = kernels.l0_scan(system.design, system.target, subsets, float(tol))
    if np.all(counts < 0):
        raise SingularSystem("no invertible row subset")
    top = counts.max()
    cand = np.flatnonzero(counts == top)
    pick = cand[np.argmin(norms[cand])]
    return coeffs[pick].copy(), int(top)


def fit(series, order, method="robust", config=None):
    """Dispatch to one of the four estimators by name."""
    if method == "yule_walker":
        return yule_walker_fit(series, order)
    system = build_design(series, order)
    if method == "ols":
        return ols_fit(system)
    if method == "l1":
        return l1_fit(system, config)
    if method == "robust":
        return robust_fit(system, config)
    raise InvalidConfig(f"unknown method {method!r}; expected one of {METHODS}")


__all__ = [
    "ARModel", "DesignSystem", "RobustConfig", "autocorrelation", "build_design",
    "estimate_scale", "fit", "l0_bruteforce", "l1_fit", "mcost", "ols_fit",
    "robust_fit", "weighted_ls_solve", "yule_walker_fit",
]
