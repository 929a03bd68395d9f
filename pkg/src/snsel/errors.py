"""Exception types shared across the package.

Every error that can surface through the CLI carries a short machine-readable
``category`` used for exit reporting.
"""


class SnselError(Exception):
    """Base class for all package errors."""

    category = "error"


class DimensionError(SnselError):
    """Input has an unusable shape (too few rows, ragged, mismatched)."""

    category = "dimension"


class ZeroVarianceColumn(SnselError):
    """A data column is constant and cannot be scaled."""

    category = "zero-variance-column"

    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} is constant; cannot scale to unit mean square")


class NumericalError(SnselError):
    """A dense factorization or decomposition failed (non-finite input)."""

    category = "numerical"


class SingularCorrection(SnselError):
    """The rank-one correction denominator is numerically zero.

    Signals a step size too small or duplicate columns in the design.
    """

    category = "singular-correction"


class InvalidWeights(SnselError):
    """A penalty weight is negative."""

    category = "invalid-weights"


class NotConverged(SnselError):
    """An iterative solver hit its iteration cap before its tolerances."""

    category = "not-converged"


class EmptyInitializer(SnselError):
    """The initial coefficient estimate is identically zero.

    Every entry would carry infinite weight, so nothing can enter the model;
    the initializer's regularization is too strong.
    """

    category = "empty-initializer"


class InfeasibleSpec(SnselError):
    """A simulation specification asks for more edges than pairs exist."""

    category = "infeasible-spec"


class DegenerateTruth(SnselError):
    """A ground truth has no true edges or no true non-edges."""

    category = "degenerate-truth"


class NotPositiveDefinite(SnselError):
    """A matrix required to be positive definite is not."""

    category = "not-positive-definite"


class NonFiniteInput(SnselError):
    """An input contains NaN or infinity."""

    category = "non-finite-input"
