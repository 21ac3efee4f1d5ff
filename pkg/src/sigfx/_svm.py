"""Shared driver for the RBF kernel machines.

The SMO inner loops live in `sigfx._backend` (compiled or NumPy, bit
identical). This module builds kernel matrices, runs the backend, then
refreshes the bias over the free dual variables and reports the final KKT
violation with common numpy code, so fitted machines do not depend on
which backend was active.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sigfx import _backend

DEFAULT_C = 1.0
DEFAULT_EPS = 0.1
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 10_000


def gamma_scale(X):
    """The usual kernel width heuristic 1 / (n_features * Var(X))."""
    X = np.asarray(X, dtype=np.float64)
    v = float(X.var())
    if not v > 0.0:
        v = 1.0
    return 1.0 / (X.shape[1] * v)


def rbf_kernel(X, Z, gamma, block=512):
    """exp(-gamma * ||x - z||^2), distances accumulated per feature.

    The feature loop avoids the x^2 - 2xz + z^2 form, so identical rows
    get distance exactly 0 and the train kernel has unit diagonal.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    n = X.shape[0]
    K = np.empty((n, Z.shape[0]))
    for s in range(0, n, block):
        e = min(s + block, n)
        D = np.zeros((e - s, Z.shape[0]))
        for f in range(X.shape[1]):
            d = X[s:e, f, None] - Z[None, :, f]
            D += d * d
        np.exp(-gamma * D, out=K[s:e])
    return K


@dataclass(frozen=True)
class KernelMachine:
    """Fitted RBF machine: f(x) = sum_i coef_i K(x_i, x) + bias.

    coef holds alpha_i * y_i for classification and beta_i for
    regression; only support vectors (coef != 0) are stored.
    """

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    gamma: float
    kkt_violation: float
    dual_gap: float  # |sum of raw dual variables|, 0 at exact feasibility
    n_updates: int

    def decision_values(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.support_vectors.shape[1]:
            raise ValueError("expected shape (m, %d), got %r"
                             % (self.support_vectors.shape[1], X.shape))
        if len(self.dual_coef) == 0:
            return np.full(X.shape[0], self.bias)
        Kq = rbf_kernel(X, self.support_vectors, self.gamma)
        return Kq @ self.dual_coef + self.bias


def _finite_matrix(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != len(y):
        raise ValueError("X must be (n, p) with y of length n")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite training values")
    return X, y


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def fit_svc(X, y_pm, C=DEFAULT_C, gamma=None, tol=DEFAULT_TOL,
            max_passes=DEFAULT_MAX_PASSES):
    """Soft-margin SVM on labels in {-1, +1} via SMO."""
    X, y = _finite_matrix(X, y_pm)
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be -1 or +1")
    C = float(C)
    if gamma is None:
        gamma = gamma_scale(X)
    gamma = float(gamma)
    K = rbf_kernel(X, X, gamma)
    alpha, b, E, updates = _backend.smo_classifier(
        K, y, C, float(tol), int(max_passes))
    # place the bias by averaging the exact per-vector value over the free
    # set; each free alpha wants f(x_i) = y_i, i.e. b_i = b_old - E_i
    free = (alpha > 0.0) & (alpha < C)
    if free.any():
        b_new = float(b - np.mean(E[free]))
    else:
        b_new = float(b)
    E = E + (b_new - b)
    r = E * y
    up = np.where(alpha < C, -r, -np.inf)
    lo = np.where(alpha > 0.0, r, -np.inf)
    kkt = float(max(0.0, np.max(np.maximum(up, lo)))) if len(y) else 0.0
    gap = abs(float(np.sum(alpha * y)))
    sv = alpha > 0.0
    return KernelMachine(
        support_vectors=_freeze(X[sv]),
        dual_coef=_freeze(alpha[sv] * y[sv]),
        bias=b_new,
        gamma=gamma,
        kkt_violation=kkt,
        dual_gap=gap,
        n_updates=int(updates),
    )


def fit_svr(X, y, C=DEFAULT_C, eps=DEFAULT_EPS, gamma=None, tol=DEFAULT_TOL,
            max_passes=DEFAULT_MAX_PASSES):
    """Epsilon-insensitive SVM regression via SMO on beta = alpha - alpha*."""
    X, y = _finite_matrix(X, y)
    C = float(C)
    eps = float(eps)
    if gamma is None:
        gamma = gamma_scale(X)
    gamma = float(gamma)
    K = rbf_kernel(X, X, gamma)
    beta, b, u, updates = _backend.smo_regressor(
        K, y, C, eps, float(tol), int(max_passes))
    # free betas pin the bias exactly: f(x_i) - y_i = -eps on the upper
    # tube edge (beta > 0) and +eps on the lower one
    fp = (beta > 0.0) & (beta < C)
    fn = (beta < 0.0) & (beta > -C)
    pinned = np.concatenate([y[fp] - u[fp] - eps, y[fn] - u[fn] + eps])
    b_new = float(np.mean(pinned)) if len(pinned) else float(b)
    E = u + b_new - y
    at_up = beta == C
    at_lo = beta == -C
    at_zero = beta == 0.0
    viol = np.zeros(len(y))
    viol[at_up] = np.maximum(0.0, E[at_up] + eps)
    viol[at_lo] = np.maximum(0.0, eps - E[at_lo])
    viol[at_zero] = np.maximum(0.0, np.abs(E[at_zero]) - eps)
    viol[fp] = np.abs(E[fp] + eps)
    viol[fn] = np.abs(E[fn] - eps)
    kkt = float(viol.max()) if len(y) else 0.0
    gap = abs(float(np.sum(beta)))
    sv = beta != 0.0
    return KernelMachine(
        support_vectors=_freeze(X[sv]),
        dual_coef=_freeze(beta[sv]),
        bias=b_new,
        gamma=gamma,
        kkt_violation=kkt,
        dual_gap=gap,
        n_updates=int(updates),
    )
