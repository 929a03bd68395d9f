"""Edge-recovery ROC evaluation.

True/false positive rates are averaged over subpopulations at each penalty
level: a position (j, l), j < l, counts as recovered when the estimated
coefficient at that slot is nonzero. The truth support comes from the
off-diagonals of the generating precision matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTruth
from .pipeline import CoefficientSet
from .simulate import GroundTruth


@dataclass
class RocCurve:
    """Recovery rates over an ascending λ grid, with area under the curve.

    The area integrates the (AFPR, ATPR) points by trapezoid after sorting
    by AFPR and augmenting with the corner points (0, 0) and (1, 1).
    """

    lambdas: np.ndarray
    afpr: np.ndarray
    atpr: np.ndarray
    auc: float


_trapz = getattr(np, "trapezoid", None) or np.trapz


def _trapezoid(y, x):
    return float(_trapz(y, x))


def auc_from_points(afpr, atpr):
    """Trapezoidal area of ROC points augmented with (0,0) and (1,1)."""
    order = np.lexsort((atpr, afpr))
    x = np.concatenate(([0.0], np.asarray(afpr)[order], [1.0]))
    y = np.concatenate(([0.0], np.asarray(atpr)[order], [1.0]))
    return _trapezoid(y, x)


def _upper(m):
    p = m.shape[0]
    iu, ju = np.triu_indices(p, k=1)
    return np.asarray(m)[iu, ju]


def rates_at(true_supports, estimate: CoefficientSet):
    """(AFPR, ATPR) of one estimate against per-subpopulation truth supports."""
    tprs, fprs = [], []
    for truth, mat in zip(true_supports, estimate.matrices):
        true_u = _upper(truth)
        est_u = _upper(mat) != 0
        pos = int(true_u.sum())
        neg = int((~true_u).sum())
        if pos == 0 or neg == 0:
            raise DegenerateTruth(
                "a subpopulation has no true edges or no true non-edges"
            )
        tprs.append((true_u & est_u).sum() / pos)
        fprs.append((~true_u & est_u).sum() / neg)
    return float(np.mean(fprs)), float(np.mean(tprs))


def roc_curve(truth: GroundTruth, fit, lambda_grid) -> RocCurve:
    """Sweep ``fit`` over the grid and score recovery against ``truth``.

    Parameters
    ----------
    truth : GroundTruth
        Generating edge structure; supports are its precision off-diagonals.
    fit : callable
        λ → CoefficientSet for the same subpopulations.
    lambda_grid : array-like
        Non-empty ascending penalty levels.
    """
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("lambda grid is empty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("lambda grid must be ascending")
    supports = truth.support_matrices()
    afpr = np.empty(grid.size)
    atpr = np.empty(grid.size)
    for i, lam in enumerate(grid):
        afpr[i], atpr[i] = rates_at(supports, fit(float(lam)))
    return RocCurve(
        lambdas=grid, afpr=afpr, atpr=atpr, auc=auc_from_points(afpr, atpr)
    )


def average_curves(curves) -> RocCurve:
    """Pointwise mean of replicate curves on a shared grid, then the area."""
    grid = curves[0].lambdas
    afpr = np.mean([c.afpr for c in curves], axis=0)
    atpr = np.mean([c.atpr for c in curves], axis=0)
    return RocCurve(
        lambdas=grid, afpr=afpr, atpr=atpr, auc=auc_from_points(afpr, atpr)
    )
