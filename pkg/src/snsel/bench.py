"""Per-iteration timing of the two ADMM kernels.

Times one full sweep of the regression ADMM (all p node blocks of one
subpopulation) against one iteration of the graphical-lasso ADMM on the
same data shape. Setup work (factorizations, Gram matrices) is excluded;
BLAS is pinned to one thread so the measured scaling reflects the kernels,
not thread-count crossovers.
"""

import time

import numpy as np
from threadpoolctl import threadpool_limits

from .admm import WeightMatrix, _FullBlockSolver
from .jgl import _positive_root_eigenmap, sample_cov, soft_threshold
from .linalg import center_scale, sym_eigen
from .simulate import SimulationSpec, simulate_dataset

WARMUP_ITERATIONS = 2
MIN_TIMED_ITERATIONS = 5
BENCH_LAMBDA = 0.1


class _JglIteration:
    """One graphical-lasso ADMM iteration, state carried across calls."""

    def __init__(self, S, lam, b):
        p = S.shape[0]
        self.S = S
        self.b = b
        self.thr = (lam / b) * np.ones((p, p))
        np.fill_diagonal(self.thr, 0.0)
        self.Z = np.eye(p)
        self.U = np.zeros((p, p))

    def step(self):
        Y, mu = sym_eigen(self.b * (self.Z - self.U) - self.S)
        Om = (Y * _positive_root_eigenmap(mu, self.b)) @ Y.T
        Om = 0.5 * (Om + Om.T)
        self.Z = soft_threshold(Om + self.U, self.thr)
        self.U = self.U + Om - self.Z


def _time_step(step, iterations):
    for _ in range(WARMUP_ITERATIONS):
        step()
    start = time.perf_counter()
    for _ in range(iterations):
        step()
    return (time.perf_counter() - start) / iterations


def bench_iteration(p, n, K=1, seed=0, b=1.0, iterations=MIN_TIMED_ITERATIONS):
    """Seconds per ADMM iteration for both methods at one problem size.

    Data is one standardized subpopulation of a synthetic scenario; both
    kernels run with unit weights at a mid-grid penalty. Each timing is the
    mean over at least five iterations after two warm-ups.
    """
    iterations = max(int(iterations), MIN_TIMED_ITERATIONS)
    spec = SimulationSpec(p=p, K=K, n=n, s=min(1.0, 2.0 / p), rho=0.0, seed=seed)
    _, raws = simulate_dataset(spec)
    X = center_scale(raws[0])

    with threadpool_limits(limits=1):
        sns_solver = _FullBlockSolver(
            X, BENCH_LAMBDA, WeightMatrix.ones(p).tau, b, n_loss=X.n
        )
        sns_seconds = _time_step(sns_solver.step, iterations)

        jgl_iter = _JglIteration(sample_cov(X), BENCH_LAMBDA, b)
        jgl_seconds = _time_step(jgl_iter.step, iterations)

    return {
        "p": p,
        "n": n,
        "sns_iter_seconds": sns_seconds,
        "jgl_iter_seconds": jgl_seconds,
    }


def loglog_slope(ps, times):
    """Least-squares slope of log(time) against log(p)."""
    return float(np.polyfit(np.log(np.asarray(ps, float)), np.log(np.asarray(times, float)), 1)[0])


def run_bench(p_list, n, seed=0, b=1.0, iterations=MIN_TIMED_ITERATIONS):
    """Timing records over a list of dimensions plus fitted slopes."""
    records = [bench_iteration(p, n, seed=seed, b=b, iterations=iterations) for p in p_list]
    ps = [r["p"] for r in records]
    slopes = {
        "sns": loglog_slope(ps, [r["sns_iter_seconds"] for r in records]),
        "jgl": loglog_slope(ps, [r["jgl_iter_seconds"] for r in records]),
    }
    return records, slopes
