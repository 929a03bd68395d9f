"""Joint neighborhood selection across subpopulations.

The procedure: fit an unweighted lasso to every node regression of every
subpopulation (the initializer), convert the pooled coefficient magnitudes
into per-entry weights through the tangent of the square-root penalty, then
solve K decoupled weighted-lasso problems that share those weights. Entries
whose pooled initial magnitude is zero carry infinite weight and are pinned
to zero. Edge sets are assembled from the coefficient supports under a
conservative (AND) or liberal (OR) rule.
"""

from dataclasses import dataclass

import numpy as np

from .admm import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL_DUAL,
    DEFAULT_TOL_PRIMAL,
    WeightMatrix,
    admm_weighted_lasso,
)
from .errors import DimensionError, EmptyInitializer
from .linalg import DataMatrix

DEFAULT_LAMBDA_INIT = 0.05
EDGE_RULES = ("and", "or")


@dataclass
class CoefficientSet:
    """K per-subpopulation p × p coefficient matrices with zero diagonals.

    ``converged`` records whether every solve contributing to the set met
    its tolerances.
    """

    matrices: list
    converged: bool = True

    def __post_init__(self):
        self.matrices = [np.asarray(m, dtype=np.float64) for m in self.matrices]
        if not self.matrices:
            raise DimensionError("need at least one subpopulation")
        p = self.matrices[0].shape[0]
        for m in self.matrices:
            if m.shape != (p, p):
                raise DimensionError("coefficient matrices must share one shape")
            if np.any(np.diag(m) != 0):
                raise DimensionError("coefficient matrices must have zero diagonals")

    @property
    def K(self):
        return len(self.matrices)

    @property
    def p(self):
        return self.matrices[0].shape[0]

    def magnitude_sum(self):
        """Entrywise Σ_k |θ_lj^(k)|."""
        return sum(np.abs(m) for m in self.matrices)

    def is_zero(self):
        return all(not m.any() for m in self.matrices)


@dataclass
class MultiEdgeSet:
    """Per-subpopulation undirected edge sets over p vertices.

    Edges are unordered pairs stored as (i, j) with i < j, 0-based.
    """

    edge_sets: list
    p: int

    @property
    def K(self):
        return len(self.edge_sets)

    def counts(self):
        return [len(e) for e in self.edge_sets]


@dataclass
class SnsConfig:
    """Configuration of one joint fit.

    ``lam`` is the single exposed penalty level: the two levels of the
    underlying common/individual factorization enter the estimator only
    through 2·√(λ₁λ₂), so only their product is identifiable.
    """

    lam: float
    lambda_init: float = DEFAULT_LAMBDA_INIT
    lla_steps: int = 1
    edge_rule: str = "and"
    b: float = 1.0
    tol_primal: float = DEFAULT_TOL_PRIMAL
    tol_dual: float = DEFAULT_TOL_DUAL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.lam < 0 or self.lambda_init < 0:
            raise ValueError("penalty levels must be nonnegative")
        if self.lla_steps < 1:
            raise ValueError("lla_steps must be at least 1")
        self.edge_rule = self.edge_rule.lower()
        if self.edge_rule not in EDGE_RULES:
            raise ValueError(f"edge_rule must be one of {EDGE_RULES}")


def _check_shared_p(data):
    if not data:
        raise DimensionError("need at least one subpopulation")
    p = data[0].p
    for X in data:
        X.require_standardized()
        if X.p != p:
            raise DimensionError(
                f"subpopulations disagree on dimension: {X.p} != {p}"
            )
    return p


def ins_fit(
    data,
    lambda_init=DEFAULT_LAMBDA_INIT,
    b=1.0,
    tol_primal=DEFAULT_TOL_PRIMAL,
    tol_dual=DEFAULT_TOL_DUAL,
    max_iter=DEFAULT_MAX_ITER,
) -> CoefficientSet:
    """Individual neighborhood selection: one unweighted lasso per subpopulation.

    Every entry carries unit weight and each subpopulation is solved against
    its own sample count. With K = 1 this is single-graph neighborhood
    selection; in the joint pipeline it provides the initial estimate.
    """
    _check_shared_p(data)
    matrices = []
    converged = True
    for X in data:
        report = admm_weighted_lasso(
            X,
            lambda_init,
            WeightMatrix.ones(X.p),
            b=b,
            tol_primal=tol_primal,
            tol_dual=tol_dual,
            max_iter=max_iter,
        )
        matrices.append(report.coefficients)
        converged &= report.converged
    return CoefficientSet(matrices, converged=converged)


def lla_weights(init: CoefficientSet) -> WeightMatrix:
    """Weights from the tangent of the square-root penalty at ``init``.

    τ_lj = ½·(Σ_k |θ_lj^(k)|)^(−1/2) where the pooled magnitude is positive;
    entries whose pooled magnitude is zero get infinite weight and are
    marked excluded.
    """
    ssum = init.magnitude_sum()
    p = init.p
    excluded = ssum == 0
    np.fill_diagonal(excluded, True)
    tau = np.zeros((p, p))
    pos = ~excluded
    tau[pos] = 0.5 / np.sqrt(ssum[pos])
    return WeightMatrix(tau=tau, excluded=excluded)


def sns_fit(data, config: SnsConfig, init: CoefficientSet = None) -> CoefficientSet:
    """Joint fit: weighted solves sharing pooled-magnitude weights.

    Runs ``config.lla_steps`` rounds; each round recomputes the weights from
    the previous coefficients and solves the K subpopulations independently
    against the shared sample count n = max_k n_k. One round from a
    consistent initializer is the default estimator.

    Raises
    ------
    EmptyInitializer
        If the initial coefficient set is identically zero, so every entry
        would be excluded (the initializer's penalty was too strong).
    """
    p = _check_shared_p(data)
    n_shared = max(X.n for X in data)
    converged = True
    if init is None:
        init = ins_fit(
            data,
            config.lambda_init,
            b=config.b,
            tol_primal=config.tol_primal,
            tol_dual=config.tol_dual,
            max_iter=config.max_iter,
        )
        converged &= init.converged
    if init.p != p:
        raise DimensionError(f"initializer dimension {init.p} does not match data {p}")
    if init.is_zero():
        raise EmptyInitializer(
            "initial estimate is identically zero; lower lambda_init"
        )

    current = init
    for _ in range(config.lla_steps):
        weights = lla_weights(current)
        matrices = []
        for X in data:
            report = admm_weighted_lasso(
                X,
                config.lam,
                weights,
                b=config.b,
                tol_primal=config.tol_primal,
                tol_dual=config.tol_dual,
                max_iter=config.max_iter,
                n_loss=n_shared,
            )
            matrices.append(report.coefficients)
            converged &= report.converged
        current = CoefficientSet(matrices, converged=converged)
    return current


def assemble_edges(theta: CoefficientSet, rule="and") -> MultiEdgeSet:
    """Edge sets from coefficient supports.

    Under "and" an edge (i, j) requires both θ_ij ≠ 0 and θ_ji ≠ 0
    (conservative); under "or" either suffices (liberal).
    """
    rule = rule.lower()
    if rule not in EDGE_RULES:
        raise ValueError(f"rule must be one of {EDGE_RULES}")
    p = theta.p
    iu, ju = np.triu_indices(p, k=1)
    edge_sets = []
    for m in theta.matrices:
        nz = m != 0
        joint = (nz & nz.T) if rule == "and" else (nz | nz.T)
        keep = joint[iu, ju]
        edge_sets.append({(int(i), int(j)) for i, j in zip(iu[keep], ju[keep])})
    return MultiEdgeSet(edge_sets, p=p)


def penalty_factorization_value(theta_entry, lam1, lam2):
    """Per-entry penalty after collapsing the common/individual factorization.

    Returns 2·√(λ₁·λ₂·Σ_k |θ^(k)|), the minimum over factorizations
    η·γ^(k) = θ^(k), η ≥ 0 of the two-level penalty — equivalently the
    minimum over η > 0 of η + λ₁λ₂·Σ_k|θ^(k)|/η, attained at
    η* = √(λ₁λ₂·Σ_k|θ^(k)|).
    """
    if lam1 <= 0 or lam2 <= 0:
        raise ValueError("both penalty levels must be positive")
    total = float(np.sum(np.abs(np.asarray(theta_entry, dtype=np.float64))))
    return 2.0 * np.sqrt(lam1 * lam2 * total)
