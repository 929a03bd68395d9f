"""Weighted-lasso ADMM over all node regressions of one subpopulation.

Solves, for a standardized n × p data matrix X,

    minimize  (1/2n)·‖X(I − Θ)‖_F² + λ·Σ_{l≠j} τ_lj·|θ_lj|
    subject to diag(Θ) = 0,

jointly over the p columns of Θ. The quadratic update decouples into p
independent node blocks; with no excluded entries each block is solved
through the rank-one-corrected identity of :mod:`snsel.linalg` (O(np) per
block, O(np²) per sweep), and entries with infinite weight are removed from
their block's design so their coefficients are structural zeros.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidWeights, SingularCorrection
from .linalg import (
    SINGULAR_CORRECTION_TOL,
    DataMatrix,
    GramShiftFactor,
    factor_gram_shift,
)

DEFAULT_TOL_PRIMAL = 1e-6
DEFAULT_TOL_DUAL = 1e-6
DEFAULT_MAX_ITER = 10000

# A converged solve must certify stationarity to within this multiple of the
# primal tolerance.
KKT_GATE_FACTOR = 10.0


def soft_threshold(z, t):
    """Componentwise ``max(z − t, 0) − max(−z − t, 0)``.

    Equals sign(z)·max(|z| − t, 0); the proximal map of t·|·|. Accepts
    scalars or arrays; ``t = inf`` maps everything to exactly zero.
    """
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z - t, 0.0) - np.maximum(-z - t, 0.0)


@dataclass
class WeightMatrix:
    """Per-entry penalty weights τ_lj with an exclusion mask.

    ``excluded[l, j]`` marks entries of infinite weight whose coefficients
    are pinned to exactly zero. Diagonal entries carry no weight; they are
    structurally absent from the optimization.
    """

    tau: np.ndarray
    excluded: np.ndarray = None

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=np.float64)
        p = self.tau.shape[0]
        if self.excluded is None:
            self.excluded = np.zeros((p, p), dtype=bool)
        else:
            self.excluded = np.asarray(self.excluded, dtype=bool).copy()
        # Infinite weights are exclusions by definition.
        self.excluded |= ~np.isfinite(self.tau)

    @classmethod
    def ones(cls, p):
        return cls(tau=np.ones((p, p)))

    @property
    def p(self):
        return self.tau.shape[0]


@dataclass
class AdmmState:
    """Iterates of the split problem, stored column-blocked.

    ``v``, ``r``, ``u`` hold the stacked coefficient, split, and scaled dual
    vectors as p × p arrays whose column j is the node-j block (diagonal
    slots are structural zeros).
    """

    v: np.ndarray
    r: np.ndarray
    u: np.ndarray
    b: float
    iterations: int = 0


@dataclass
class SolveReport:
    """Outcome of one weighted-lasso solve.

    ``coefficients`` is the split iterate r at exit, so zeros are exact.
    """

    coefficients: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    kkt_residual: float
    converged: bool


def _offdiag_mask(p):
    m = np.ones((p, p), dtype=bool)
    np.fill_diagonal(m, False)
    return m


def _kkt_from_gram(C, theta, scaled_tau, skip):
    """Max KKT violation given the Gram matrix C = XᵀX.

    ``scaled_tau`` holds n·λ·τ_lj; ``skip`` marks entries outside the
    optimization (diagonal and exclusions).
    """
    grad = C - C @ theta
    active = (theta != 0) & ~skip
    inactive = (theta == 0) & ~skip
    worst = 0.0
    if active.any():
        resid = np.abs(grad[active] - scaled_tau[active] * np.sign(theta[active]))
        worst = float(resid.max())
    if inactive.any():
        slack = np.abs(grad[inactive]) - scaled_tau[inactive]
        worst = max(worst, float(max(slack.max(), 0.0)))
    return worst


def kkt_residual(X: DataMatrix, theta, lam, weights: WeightMatrix, n_loss=None):
    """Maximum violation of the stationarity conditions at ``theta``.

    For each off-diagonal, non-excluded entry (l, j):

    * if θ_lj ≠ 0:  |Xₗᵀ(Xⱼ − X₋ⱼθⱼ) − nλτ_lj·sign(θ_lj)|
    * if θ_lj = 0:  max(0, |Xₗᵀ(Xⱼ − X₋ⱼθⱼ)| − nλτ_lj)

    A zero value certifies ``theta`` as a minimizer of the weighted-lasso
    objective. ``n_loss`` overrides the sample count in the loss scaling
    (used when a pipeline solves against a shared n).
    """
    V = X.values
    p = V.shape[1]
    theta = np.asarray(theta, dtype=np.float64)
    n = V.shape[0] if n_loss is None else n_loss
    C = V.T @ V
    skip = ~_offdiag_mask(p) | weights.excluded
    return _kkt_from_gram(C, theta, n * lam * weights.tau, skip)


def objective_value(X: DataMatrix, theta, lam, weights: WeightMatrix, n_loss=None):
    """Value of (1/2n)·‖X(I − Θ)‖_F² + λ·Σ τ_lj·|θ_lj| at ``theta``."""
    V = X.values
    n = V.shape[0] if n_loss is None else n_loss
    resid = V - V @ theta
    loss = 0.5 / n * float(np.sum(resid * resid))
    mask = _offdiag_mask(theta.shape[0]) & ~weights.excluded
    penalty = lam * float(np.sum(weights.tau[mask] * np.abs(theta[mask])))
    return loss + penalty


class _FullBlockSolver:
    """All p node blocks at full width, advanced together.

    Valid only when no entry is excluded: every block then shares the
    (p−1)-column design shape, and one sweep of the corrected solves is two
    (p × n)(n × p) products against the cached G and the raw design.
    """

    def __init__(self, X, lam, tau, b, n_loss, factor=None):
        V = X.values
        self.n, self.p = V.shape
        self.nb = n_loss * b
        if factor is None:
            factor = factor_gram_shift(X, self.nb / self.n)
        elif abs(factor.shift - self.nb) > 1e-9 * max(1.0, self.nb):
            raise ValueError("supplied factor was built for a different shift n·b")
        self.factor = factor
        self.V = V
        self.VT = np.ascontiguousarray(V.T)
        self.G = factor.G
        P = self.VT @ self.G
        self.P = P
        den = 1.0 - np.diag(P)
        if np.min(np.abs(den)) < SINGULAR_CORRECTION_TOL:
            j = int(np.argmin(np.abs(den)))
            raise SingularCorrection(
                f"correction denominator {den[j]:.3e} at column {j}"
            )
        self.den = den
        C = self.VT @ V
        self.C = C
        self.Coff = C.copy()
        np.fill_diagonal(self.Coff, 0.0)
        self.thr = (lam / b) * tau
        np.fill_diagonal(self.thr, 0.0)

        p = self.p
        self.state = AdmmState(
            v=np.zeros((p, p)), r=np.zeros((p, p)), u=np.zeros((p, p)), b=b
        )
        self._Q = np.empty((p, p))
        self._A = np.empty((p, p))
        self._W = np.empty((self.n, p))
        self._T = np.empty((p, p))
        self._Rnew = np.empty((p, p))
        self._r_prev = np.zeros((p, p))

    def step(self):
        """One ADMM iteration over every node block."""
        st = self.state
        Q, A, W, T, Rnew = self._Q, self._A, self._W, self._T, self._Rnew
        nb = self.nb

        # Quadratic update: q_j = X₋ⱼᵀXⱼ + nb(r_j − u_j), then the corrected
        # solve of (X₋ⱼᵀX₋ⱼ + nb·I)⁻¹ q_j for all j at once.
        np.subtract(st.r, st.u, out=Q)
        Q *= nb
        Q += self.Coff
        np.matmul(self.G, Q, out=W)
        np.matmul(self.VT, W, out=A)
        rho = np.einsum("ii->i", A).copy()
        Q -= A
        np.multiply(self.P, rho / self.den, out=A)
        Q -= A
        Q /= nb
        np.fill_diagonal(Q, 0.0)
        st.v, self._Q = Q, st.v

        # Proximal update: componentwise soft threshold at λτ/b.
        np.add(st.v, st.u, out=T)
        np.abs(T, out=Rnew)
        Rnew -= self.thr
        np.maximum(Rnew, 0.0, out=Rnew)
        np.copysign(Rnew, T, out=Rnew)
        np.fill_diagonal(Rnew, 0.0)

        # Dual ascent on the split constraint v = r.
        st.u += st.v
        st.u -= Rnew
        st.r, self._Rnew = Rnew, st.r
        self._r_prev = self._Rnew
        st.iterations += 1

    def residual_norms(self):
        st = self.state
        primal = float(np.linalg.norm(st.v - st.r))
        dual = st.b * float(np.linalg.norm(st.r - self._r_prev))
        return primal, dual

    def norms(self):
        st = self.state
        return (
            float(np.linalg.norm(st.v)),
            float(np.linalg.norm(st.r)),
            float(np.linalg.norm(st.u)),
        )

    def kkt(self, scaled_tau, skip):
        return _kkt_from_gram(self.C, self.state.r, scaled_tau, skip)

    def coefficients(self):
        return self.state.r.copy()


class _NodeBlock:
    """One node's reduced design after dropping excluded predictors."""

    def __init__(self, V, j, active_idx, nb):
        self.j = j
        self.idx = active_idx
        A = V[:, active_idx]
        S = A.T @ A
        S[np.diag_indices_from(S)] += nb
        self.cho = scipy.linalg.cho_factor(S, lower=True)
        self.base = A.T @ V[:, j]
        q = active_idx.size
        self.v = np.zeros(q)
        self.r = np.zeros(q)
        self.u = np.zeros(q)
        self.r_prev = np.zeros(q)


class _ReducedBlockSolver:
    """Per-node solves on exclusion-reduced designs.

    Used when any entry is excluded; each block factors its own shifted Gram
    matrix once and back-substitutes per iteration.
    """

    def __init__(self, X, lam, tau, excluded, b, n_loss):
        V = X.values
        self.n, self.p = V.shape
        self.nb = n_loss * b
        self.b = b
        self.C = V.T @ V
        self.blocks = []
        for j in range(self.p):
            active = ~excluded[:, j]
            active[j] = False
            idx = np.flatnonzero(active)
            if idx.size == 0:
                continue
            blk = _NodeBlock(V, j, idx, self.nb)
            blk.thr = (lam / b) * tau[idx, j]
            self.blocks.append(blk)
        self.iterations = 0

    def step(self):
        nb = self.nb
        for blk in self.blocks:
            rhs = blk.base + nb * (blk.r - blk.u)
            blk.v = scipy.linalg.cho_solve(blk.cho, rhs)
            t = blk.v + blk.u
            blk.r_prev = blk.r
            blk.r = np.copysign(np.maximum(np.abs(t) - blk.thr, 0.0), t)
            blk.u = blk.u + blk.v - blk.r
        self.iterations += 1

    def residual_norms(self):
        primal = sum(float(np.sum((blk.v - blk.r) ** 2)) for blk in self.blocks)
        dual = sum(float(np.sum((blk.r - blk.r_prev) ** 2)) for blk in self.blocks)
        return np.sqrt(primal), self.b * np.sqrt(dual)

    def norms(self):
        sq = np.zeros(3)
        for blk in self.blocks:
            sq += (np.sum(blk.v**2), np.sum(blk.r**2), np.sum(blk.u**2))
        return tuple(np.sqrt(sq))

    def kkt(self, scaled_tau, skip):
        return _kkt_from_gram(self.C, self.coefficients(), scaled_tau, skip)

    def coefficients(self):
        theta = np.zeros((self.p, self.p))
        for blk in self.blocks:
            theta[blk.idx, blk.j] = blk.r
        return theta


def admm_weighted_lasso(
    X: DataMatrix,
    lam,
    weights: WeightMatrix = None,
    b=1.0,
    tol_primal=DEFAULT_TOL_PRIMAL,
    tol_dual=DEFAULT_TOL_DUAL,
    max_iter=DEFAULT_MAX_ITER,
    n_loss=None,
    factor: GramShiftFactor = None,
) -> SolveReport:
    """Solve the zero-diagonal weighted lasso over all node regressions.

    Parameters
    ----------
    X : DataMatrix
        Standardized observations.
    lam : float
        Nonnegative penalty level.
    weights : WeightMatrix, optional
        Per-entry weights; defaults to all ones. Excluded entries are
        removed from their block's design, so their coefficients are exact
        structural zeros.
    b : float
        ADMM step size. The converged solution does not depend on it.
    tol_primal, tol_dual : float
        Scaled stopping thresholds on ‖v − r‖₂ and b·‖rᵗ⁺¹ − rᵗ‖₂.
    max_iter : int
        Iteration cap; on hitting it the best iterate is returned with
        ``converged=False`` rather than raising.
    n_loss : int, optional
        Sample count used in the 1/(2n) loss factor; defaults to X's own
        row count. Joint pipelines pass their shared n here.
    factor : GramShiftFactor, optional
        Prebuilt factorization matching this (X, b, n_loss); reused when
        sweeping a λ grid at a fixed step size.

    Returns
    -------
    SolveReport
        Coefficients are the split iterate, so zeros are exact; a report is
        declared converged only once the stationarity residual also passes
        ``10·tol_primal``.
    """
    X.require_standardized()
    V = X.values
    n, p = V.shape
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if b <= 0:
        raise ValueError(f"step size b must be positive, got {b}")
    if weights is None:
        weights = WeightMatrix.ones(p)
    offdiag = _offdiag_mask(p)
    if np.any(weights.tau[offdiag & ~weights.excluded] < 0):
        raise InvalidWeights("negative penalty weight")
    if n_loss is None:
        n_loss = n

    excluded_any = bool(np.any(weights.excluded & offdiag))
    if excluded_any:
        solver = _ReducedBlockSolver(X, lam, weights.tau, weights.excluded, b, n_loss)
    else:
        solver = _FullBlockSolver(X, lam, weights.tau, b, n_loss, factor=factor)

    skip = ~offdiag | weights.excluded
    scaled_tau = n_loss * lam * weights.tau
    kkt_gate = KKT_GATE_FACTOR * tol_primal

    primal = dual = kkt = np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        solver.step()
        primal, dual = solver.residual_norms()
        nv, nr, nu = solver.norms()
        if primal <= tol_primal * max(1.0, nv, nr) and dual <= tol_dual * max(1.0, nu):
            kkt = solver.kkt(scaled_tau, skip)
            if kkt <= kkt_gate:
                converged = True
                break
    if not converged:
        kkt = solver.kkt(scaled_tau, skip)

    return SolveReport(
        coefficients=solver.coefficients(),
        iterations=it,
        primal_residual=primal,
        dual_residual=dual,
        kkt_residual=kkt,
        converged=converged,
    )
