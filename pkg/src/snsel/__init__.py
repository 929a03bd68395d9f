"""Joint edge-structure estimation for multiple Gaussian graphical models.

Per-node sparse regressions recover each variable's neighborhood; a pooled
square-root penalty across subpopulations shares the common structure, and
its tangent linearization reduces each fit to a weighted lasso solved by a
block-structured ADMM. A weighted graphical-lasso ADMM is included as the
likelihood-based baseline, together with a synthetic-scenario generator,
ROC/AUC evaluation, and per-iteration timing benchmarks.
"""

from .admm import (
    AdmmState,
    SolveReport,
    WeightMatrix,
    admm_weighted_lasso,
    kkt_residual,
    objective_value,
    soft_threshold,
)
from .errors import (
    DegenerateTruth,
    DimensionError,
    EmptyInitializer,
    InfeasibleSpec,
    InvalidWeights,
    NonFiniteInput,
    NotConverged,
    NotPositiveDefinite,
    NumericalError,
    SingularCorrection,
    SnselError,
    ZeroVarianceColumn,
)
from .evaluate import RocCurve, auc_from_points, average_curves, rates_at, roc_curve
from .jgl import jgl_fit, jgl_pipeline, precision_supports, sample_cov
from .linalg import (
    DataMatrix,
    GramShiftFactor,
    center_scale,
    factor_gram_shift,
    sym_eigen,
    woodbury_apply,
)
from .oracle import coordinate_descent_oracle
from .pipeline import (
    CoefficientSet,
    MultiEdgeSet,
    SnsConfig,
    assemble_edges,
    ins_fit,
    lla_weights,
    penalty_factorization_value,
    sns_fit,
)
from .simulate import (
    GroundTruth,
    SimulationSpec,
    build_ground_truth,
    derive_seed,
    gen_edge_sets,
    gen_precision,
    sample_mvn,
    simulate_dataset,
    stream,
)

__version__ = "0.1.0"
