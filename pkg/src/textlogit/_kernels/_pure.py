"""Numpy fallback for the coordinate-descent sweep.

Mirrors the compiled kernel exactly: one full pass over the columns of a
CSC matrix, updating coefficients, the shared residual, and (optionally)
the unpenalized intercept. Scalar updates delegate to the penalty module
so there is a single reference definition of the thresholding rule.
"""

import numpy as np

from ..penalty import ScadParams, coordinate_update


def scad_update(z: float, v: float, lam: float, gamma: float, adaptive: bool) -> float:
    return coordinate_update(z, v, ScadParams(lam=lam, gamma=gamma), adaptive)


def cd_sweep(
    data: np.ndarray,
    indices: np.ndarray,
    indptr: np.ndarray,
    n_rows: int,
    w: np.ndarray,
    r: np.ndarray,
    beta: np.ndarray,
    intercept: np.ndarray,
    v: np.ndarray,
    v0: float,
    lam: float,
    gamma: float,
    adaptive: bool,
    fit_intercept: bool,
    cap: float,
    cols: np.ndarray,
) -> float:
    """One coordinate sweep over the listed columns; mutates beta,
    intercept and r. Returns the largest absolute coefficient change."""
    n = float(n_rows)
    params = ScadParams(lam=lam, gamma=gamma)
    max_change = 0.0

    if fit_intercept:
        z0 = float(w @ r) / n + v0 * intercept[0]
        new0 = z0 / v0
        delta0 = new0 - intercept[0]
        if delta0 != 0.0:
            r -= delta0
            intercept[0] = new0
            max_change = abs(delta0)

    for j in cols:
        vj = v[j]
        if vj <= 0.0:
            if beta[j] != 0.0:
                max_change = max(max_change, abs(beta[j]))
                beta[j] = 0.0
            continue
        lo, hi = indptr[j], indptr[j + 1]
        idx = indices[lo:hi]
        xj = data[lo:hi]
        zj = float(xj @ (w[idx] * r[idx])) / n + vj * beta[j]
        bnew = coordinate_update(zj, vj, params, adaptive)
        if bnew > cap:
            bnew = cap
        elif bnew < -cap:
            bnew = -cap
        delta = bnew - beta[j]
        if delta != 0.0:
            r[idx] -= delta * xj
            beta[j] = bnew
            if abs(delta) > max_change:
                max_change = abs(delta)
    return max_change
