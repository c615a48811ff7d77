"""Independent reference implementations used as test oracles.

These deliberately avoid the package's own code paths: brute-force grid
scans, literal summation loops, and a dense Newton solver. They are slow
and simple on purpose.
"""

import numpy as np
from scipy.special import expit


def scad_value(b, lam, gamma):
    """Direct three-branch penalty evaluation (scalar or array)."""
    ab = np.abs(b)
    mid = -(ab**2 - 2 * gamma * lam * ab + lam**2) / (2 * (gamma - 1))
    return np.where(
        ab <= lam, lam * ab, np.where(ab <= gamma * lam, mid, (gamma + 1) * lam**2 / 2)
    )


def brute_force_prox(z, v, lam, gamma, fine_step=1e-5):
    """Grid-scan minimizer of v*b^2/2 - z*b + scad(b).

    A coarse scan bounds every candidate basin, then a fine scan refines
    around the best coarse point and around each penalty knot.
    """

    def g(b):
        return 0.5 * v * b * b - z * b + scad_value(b, lam, gamma)

    radius = max(gamma * lam, abs(z) / v) + 1.0
    coarse = np.arange(-radius, radius, 1e-3)
    centers = {float(coarse[np.argmin(g(coarse))]), 0.0, lam, -lam,
               gamma * lam, -gamma * lam, z / v}
    best_b, best_val = 0.0, g(0.0)
    for c in centers:
        grid = c + np.arange(-2e-3, 2e-3 + fine_step, fine_step)
        vals = g(grid)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_b, best_val = float(grid[i]), float(vals[i])
    return best_b


def newton_logistic(X, y, fit_intercept=True, max_iter=200, tol=1e-12):
    """Dense Newton-Raphson maximum likelihood logistic fit."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if fit_intercept:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
    b = np.zeros(X.shape[1])
    for _ in range(max_iter):
        pi = expit(X @ b)
        W = np.maximum(pi * (1 - pi), 1e-10)
        grad = X.T @ (y - pi)
        hess = (X * W[:, None]).T @ X
        step = np.linalg.solve(hess, grad)
        b = b + step
        if np.abs(step).max() < tol:
            break
    return b


def literal_nll(intercept, beta, X, y, clamp=1e-12):
    """Negative log-likelihood by explicit per-observation summation."""
    X = np.asarray(X, dtype=np.float64)
    total = 0.0
    for i in range(X.shape[0]):
        eta = intercept + float(X[i] @ beta)
        pi = min(max(1.0 / (1.0 + np.exp(-eta)), clamp), 1.0 - clamp)
        total += y[i] * np.log(pi) + (1 - y[i]) * np.log(1 - pi)
    return -total / X.shape[0]


def literal_confusion(predictions, truths):
    """Cell counts by an explicit loop; 1 = positive."""
    a = b = c = d = 0
    for p, t in zip(predictions, truths):
        if p == 1 and t == 1:
            a += 1
        elif p == 1 and t == 0:
            b += 1
        elif p == 0 and t == 1:
            c += 1
        else:
            d += 1
    return a, b, c, d


def loo_cv_nll(X, y, fit_one, clamp=1e-12):
    """Literal leave-one-out loop; fit_one(X_train, y_train) -> (b0, beta)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    total = 0.0
    for i in range(n):
        mask = np.ones(n, dtype=bool)
        mask[i] = False
        b0, beta = fit_one(X[mask], y[mask])
        eta = b0 + float(X[i] @ beta)
        pi = min(max(1.0 / (1.0 + np.exp(-eta)), clamp), 1.0 - clamp)
        total += -(y[i] * np.log(pi) + (1 - y[i]) * np.log(1 - pi))
    return total / n


def svm_grid_objective_min(X, y_pm, cost, w_range=(-6, 6), b_range=(-6, 6), steps=241):
    """Fine 2-D grid search over (w, b) for 1-feature hinge-loss SVMs."""
    X = np.asarray(X, dtype=np.float64).ravel()
    best = np.inf
    for w in np.linspace(*w_range, steps):
        margins = y_pm * (w * X + np.linspace(*b_range, steps)[:, None])
        hinge = np.maximum(0.0, 1.0 - margins).sum(axis=1)
        vals = 0.5 * w * w + cost * hinge
        best = min(best, float(vals.min()))
    return best
