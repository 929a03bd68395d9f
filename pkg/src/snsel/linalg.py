"""Dense linear-algebra substrate.

Centering/scaling of observation matrices, the shifted-Gram factorization
``M = X Xᵀ + n·b·I`` with its cached application ``G = M⁻¹X``, the rank-one
corrected solve used by the regression ADMM, and symmetric eigendecomposition
for the graphical-lasso baseline.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalError, SingularCorrection, ZeroVarianceColumn

# Denominator guard for the rank-one correction; below this the correction is
# numerically meaningless (step size too small or duplicate columns).
SINGULAR_CORRECTION_TOL = 1e-12


@dataclass
class DataMatrix:
    """An n × p observation matrix (rows are observations).

    ``standardized`` records that every column has zero mean and unit mean
    square, i.e. (1/n)·Σᵢ xᵢⱼ² = 1.
    """

    values: np.ndarray
    standardized: bool = False

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def require_standardized(self):
        if not self.standardized:
            raise ValueError("operation requires a centered and scaled DataMatrix")
        return self


def center_scale(raw) -> DataMatrix:
    """Center each column to mean zero and scale it to unit mean square.

    The scaling convention is (1/n)·Σᵢ xᵢⱼ² = 1 (the 1/n moment, not the
    1/(n−1) sample variance). The operation is deterministic and idempotent.

    Parameters
    ----------
    raw : array-like, shape (n, p)
        Observation matrix, rows are observations.

    Returns
    -------
    DataMatrix
        Standardized copy of the input.

    Raises
    ------
    DimensionError
        If fewer than two rows are supplied.
    ZeroVarianceColumn
        If some column is constant.
    """
    X = np.asarray(raw, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {X.shape}")
    n, p = X.shape
    if n < 2:
        raise DimensionError(f"need at least 2 observations, got {n}")
    if not np.all(np.isfinite(X)):
        raise NumericalError("input matrix contains NaN or infinity")
    centered = X - X.mean(axis=0)
    meansq = np.einsum("ij,ij->j", centered, centered) / n
    bad = np.flatnonzero(meansq <= np.finfo(np.float64).tiny)
    if bad.size:
        raise ZeroVarianceColumn(int(bad[0]))
    return DataMatrix(centered / np.sqrt(meansq), standardized=True)


@dataclass(frozen=True)
class GramShiftFactor:
    """Cholesky factorization of ``M = X Xᵀ + n·b·Iₙ`` with cached ``G = M⁻¹X``.

    Built once per (data, step-size) pair; immutable and safe to share across
    concurrent solves. ``shift`` is the diagonal shift ``n·b``.
    """

    chol: np.ndarray  # lower-triangular L with M = L Lᵀ
    G: np.ndarray  # M⁻¹ X, n × p
    b: float
    n: int
    shift: float


def factor_gram_shift(X: DataMatrix, b: float) -> GramShiftFactor:
    """Factor ``M = X Xᵀ + n·b·Iₙ`` and cache ``G = M⁻¹X``.

    Cost O(n³ + n²p), paid once; afterwards each corrected solve is O(np).
    """
    if b <= 0:
        raise ValueError(f"step size b must be positive, got {b}")
    V = X.values
    n = X.n
    shift = n * b
    if not np.all(np.isfinite(V)):
        raise NumericalError("data matrix contains NaN or infinity")
    M = V @ V.T
    M[np.diag_indices_from(M)] += shift
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:  # M ≻ 0 in exact arithmetic
        raise NumericalError(f"Cholesky of the shifted Gram matrix failed: {exc}") from exc
    G = scipy.linalg.cho_solve((L, True), V)
    return GramShiftFactor(chol=L, G=G, b=float(b), n=n, shift=float(shift))


def woodbury_apply(factor: GramShiftFactor, X: DataMatrix, j: int, v) -> np.ndarray:
    """Apply ``(X₋ⱼᵀX₋ⱼ + n·b·I)⁻¹`` to a vector without forming the inverse.

    Uses the identity

        (X₋ⱼᵀX₋ⱼ + n·b·I)⁻¹ = (1/nb)·(I − X₋ⱼᵀM⁻¹X₋ⱼ
            − X₋ⱼᵀM⁻¹Xⱼ XⱼᵀM⁻¹X₋ⱼ / (1 − XⱼᵀM⁻¹Xⱼ)),

    evaluated as matrix-vector products against the cached ``G = M⁻¹X``,
    so each call costs O(np).

    Parameters
    ----------
    factor : GramShiftFactor
        Factorization of the full-design shifted Gram matrix.
    X : DataMatrix
        The design whose factorization was taken.
    j : int
        Held-out column, 0-based.
    v : array-like, shape (p−1,)
        Right-hand side, indexed over the columns of X with column j removed.

    Raises
    ------
    SingularCorrection
        If the correction denominator ``1 − XⱼᵀM⁻¹Xⱼ`` is numerically zero.
    """
    V = X.values
    n, p = V.shape
    if not 0 <= j < p:
        raise IndexError(f"column index {j} out of range for p={p}")
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (p - 1,):
        raise DimensionError(f"expected right-hand side of length {p - 1}, got {v.shape}")

    g = factor.G[:, j]
    delta = V[:, j] @ g
    den = 1.0 - delta
    if abs(den) < SINGULAR_CORRECTION_TOL:
        raise SingularCorrection(
            f"correction denominator {den:.3e} at column {j}; "
            "step size too small or duplicate columns"
        )

    vfull = np.insert(v, j, 0.0)
    w = factor.G @ vfull  # M⁻¹ X₋ⱼ v
    a = V.T @ w  # X ᵀ M⁻¹ X₋ⱼ v
    c = V.T @ g  # X ᵀ M⁻¹ Xⱼ
    rho = V[:, j] @ w
    full = vfull - a - c * (rho / den)
    return np.delete(full, j) / factor.shift


def sym_eigen(A):
    """Symmetric eigendecomposition ``A = Y Λ Yᵀ``.

    Returns ``(Y, lam)`` with orthonormal columns in Y and eigenvalues in
    ascending order. Uses the classic QR LAPACK path, whose cost grows
    uniformly cubically over the matrix sizes this package targets.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix contains NaN or infinity")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > 1e-10:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    lam, Y = scipy.linalg.eigh(A, driver="ev")
    return Y, lam
