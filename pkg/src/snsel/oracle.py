"""Independent cyclic coordinate-descent solver for the node regressions.

Minimizes the same zero-diagonal weighted-lasso objective as
:func:`snsel.admm.admm_weighted_lasso`, one coordinate at a time, and shares
no code with the ADMM path. Intended for small problems (p ≤ 20); it exists
so the production solver can be cross-checked against a second route.
"""

import numpy as np

from .admm import WeightMatrix
from .errors import NotConverged
from .linalg import DataMatrix

OBJECTIVE_STAGNATION = 1e-10
MAX_SWEEPS = 100_000


def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def coordinate_descent_oracle(
    X: DataMatrix,
    lam,
    weights: WeightMatrix = None,
    n_loss=None,
    max_sweeps=MAX_SWEEPS,
):
    """Zero-diagonal minimizer of the weighted-lasso objective by cyclic CD.

    Each node regression is swept until its objective value stagnates below
    ``1e-10``. Returns the p × p coefficient matrix; excluded entries stay
    exactly zero.

    Raises
    ------
    NotConverged
        If some node still moves after ``max_sweeps`` sweeps.
    """
    X.require_standardized()
    V = X.values
    n, p = V.shape
    if weights is None:
        weights = WeightMatrix.ones(p)
    if n_loss is None:
        n_loss = n

    theta = np.zeros((p, p))
    col_sq = np.einsum("ij,ij->j", V, V) / n_loss  # X_lᵀX_l / n, = n/n_loss here
    for j in range(p):
        y = V[:, j]
        active = ~weights.excluded[:, j]
        active[j] = False
        idx = np.flatnonzero(active)
        if idx.size == 0:
            continue
        tau = weights.tau[idx, j]
        coef = np.zeros(idx.size)
        resid = y.copy()

        def obj():
            return 0.5 / n_loss * float(resid @ resid) + lam * float(tau @ np.abs(coef))

        prev = obj()
        for _ in range(max_sweeps):
            for t, l in enumerate(idx):
                old = coef[t]
                if old != 0.0:
                    resid += V[:, l] * old
                rho = float(V[:, l] @ resid) / n_loss
                new = _soft(rho, lam * tau[t]) / col_sq[l]
                coef[t] = new
                if new != 0.0:
                    resid -= V[:, l] * new
            cur = obj()
            if abs(prev - cur) <= OBJECTIVE_STAGNATION:
                break
            prev = cur
        else:
            raise NotConverged(f"coordinate descent did not settle for node {j}")
        theta[idx, j] = coef
    return theta
