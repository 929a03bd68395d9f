"""Synthetic multi-subpopulation graphical-model generator.

Edge structure: a common pair set shared by all subpopulations plus
per-subpopulation individual sets that avoid the common set and have empty
joint intersection. Precision matrices put U(0.5, 1) magnitudes with
Rademacher signs on the edges, symmetrize, and set each diagonal to the
absolute row sum plus one, so every eigenvalue is at least one (circle
bound). Sampling is by back-substitution against the Cholesky factor of the
precision matrix.

All draws come from named counter-based generators (Philox 4x64) keyed by a
64-bit seed and a fixed purpose tag, so any output is reproducible
bit-for-bit from (spec, seed).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, InfeasibleSpec, NotPositiveDefinite

PRNG_ID = "philox-4x64"

# Purpose tags for domain-separated substreams.
_STREAM_EDGES = 0
_STREAM_OMEGA = 1
_STREAM_DATA = 2


def stream(seed, *key):
    """Deterministic generator for (seed, purpose-key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, index):
    """A child 64-bit seed for replicate ``index``; stable across runs."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class SimulationSpec:
    """Shape of one synthetic scenario.

    ``s`` is the common-edge count as a proportion of C(p, 2); ``rho`` sizes
    each individual set as a proportion of the common set.
    """

    p: int
    K: int
    n: int
    s: float
    rho: float
    seed: int

    def __post_init__(self):
        if self.p < 2:
            raise DimensionError(f"need p >= 2 vertices, got {self.p}")
        if self.K < 1:
            raise DimensionError(f"need K >= 1 subpopulations, got {self.K}")
        if self.n < 2:
            raise DimensionError(f"need n >= 2 samples, got {self.n}")
        if not 0 <= self.s <= 1:
            raise InfeasibleSpec(f"s must lie in [0, 1], got {self.s}")
        if self.rho < 0:
            raise InfeasibleSpec(f"rho must be nonnegative, got {self.rho}")
        total = self.total_pairs
        if self.n_common + self.K * self.n_individual > total:
            raise InfeasibleSpec(
                f"edge budget {self.n_common} + {self.K}*{self.n_individual} "
                f"exceeds the {total} available pairs"
            )

    @property
    def total_pairs(self):
        return self.p * (self.p - 1) // 2

    @property
    def n_common(self):
        return int(round(self.s * self.total_pairs))

    @property
    def n_individual(self):
        return int(round(self.rho * self.n_common))

    def to_dict(self):
        return {
            "p": self.p, "K": self.K, "n": self.n,
            "s": self.s, "rho": self.rho, "seed": self.seed,
        }


@dataclass
class GroundTruth:
    """Edge sets and precision matrices of one scenario.

    ``edge_sets[k]`` is the union of the common set and subpopulation k's
    individual set; ``precisions[k]`` has exactly that off-diagonal support.
    """

    common: set
    individual: list
    edge_sets: list
    precisions: list

    @property
    def K(self):
        return len(self.edge_sets)

    @property
    def p(self):
        return self.precisions[0].shape[0]

    def support_matrices(self):
        """Boolean p × p true-edge indicators, symmetric, per subpopulation."""
        out = []
        for Om in self.precisions:
            m = Om != 0
            np.fill_diagonal(m, False)
            out.append(m)
        return out


def _all_pairs(p):
    iu, ju = np.triu_indices(p, k=1)
    return list(zip(iu.tolist(), ju.tolist()))


def gen_edge_sets(spec: SimulationSpec):
    """Draw the common set and the K individual sets.

    The common set A is a uniform draw of round(s·C(p,2)) pairs. The
    individual sets are built by drawing K·round(ρ·|A|) distinct pairs
    outside A and dealing them round-robin, which guarantees both that no
    individual edge touches A and that no pair lands in every individual
    set, without any rejection loop.
    """
    pairs = _all_pairs(spec.p)
    total = len(pairs)
    rng = stream(spec.seed, _STREAM_EDGES)
    n_common = spec.n_common
    idx_common = rng.choice(total, size=n_common, replace=False) if n_common else np.array([], dtype=int)
    common = {pairs[i] for i in idx_common}

    m = spec.n_individual
    individual = [set() for _ in range(spec.K)]
    if m:
        rest = np.setdiff1d(np.arange(total), idx_common)
        drawn = rng.choice(rest, size=spec.K * m, replace=False)
        for pos, idx in enumerate(drawn.tolist()):
            individual[pos % spec.K].add(pairs[idx])
    return common, individual


def gen_precision(p, edges, rng):
    """Precision matrix with support ``edges`` and minimum eigenvalue ≥ 1.

    Edge slots (upper triangle) get U(0.5, 1) magnitudes with equiprobable
    signs; symmetrization halves them, and each diagonal element is the
    absolute off-diagonal row sum plus one.
    """
    edges = sorted(edges)
    A = np.zeros((p, p))
    if edges:
        mags = rng.uniform(0.5, 1.0, size=len(edges))
        signs = rng.integers(0, 2, size=len(edges)) * 2 - 1
        for (i, j), a, sgn in zip(edges, mags, signs.tolist()):
            A[i, j] = a * sgn
    C = 0.5 * (A + A.T)
    Om = C.copy()
    np.fill_diagonal(Om, np.sum(np.abs(C), axis=1) + 1.0)
    return Om


def sample_mvn(Om, n, rng):
    """n i.i.d. rows from the centered Gaussian whose precision is ``Om``.

    Draws standard normals Z and solves Lᵀx = z rowwise, where Om = LLᵀ, so
    the rows have covariance Om⁻¹. Bit-identical for identical generators.
    """
    Om = np.asarray(Om, dtype=np.float64)
    try:
        L = np.linalg.cholesky(Om)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"precision matrix is not positive definite: {exc}") from exc
    Z = rng.standard_normal((n, Om.shape[0]))
    return scipy.linalg.solve_triangular(L, Z.T, lower=True, trans="T").T


def build_ground_truth(spec: SimulationSpec) -> GroundTruth:
    """Edge sets and precisions for one scenario, reproducible from the spec."""
    common, individual = gen_edge_sets(spec)
    edge_sets = [common | individual[k] for k in range(spec.K)]
    precisions = [
        gen_precision(spec.p, edge_sets[k], stream(spec.seed, _STREAM_OMEGA, k))
        for k in range(spec.K)
    ]
    return GroundTruth(common, individual, edge_sets, precisions)


def simulate_dataset(spec: SimulationSpec):
    """Ground truth plus raw (unstandardized) samples for every subpopulation."""
    truth = build_ground_truth(spec)
    raws = [
        sample_mvn(truth.precisions[k], spec.n, stream(spec.seed, _STREAM_DATA, k))
        for k in range(spec.K)
    ]
    return truth, raws
