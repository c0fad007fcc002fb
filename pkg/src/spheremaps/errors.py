"""Exception hierarchy shared by every module."""


class SphereMapError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SphereMapError, ValueError):
    """Input violates a documented precondition on its values."""


class DimensionError(ValidationError):
    """Shapes or sizes of the inputs do not fit together."""


class NotPSDError(ValidationError):
    """A Hermitian matrix has an eigenvalue below the PSD tolerance."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class PoleError(SphereMapError, ArithmeticError):
    """Evaluation hit (or a check found) a zero of the denominator."""

    def __init__(self, message, root):
        super().__init__(message)
        self.root = root


class NotInModuliError(ValidationError):
    """A Gram matrix does not satisfy the sphere-map constraint system."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


class NotASphereMapError(ValidationError):
    """The map does not send the circle to the sphere within tolerance."""


class DegreeError(ValidationError):
    """The map has the wrong degree for the requested operation."""


class PreconditionError(ValidationError):
    """A named precondition of an operation is not met."""

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class InconsistencyError(SphereMapError):
    """Internal cross-check failed; the result cannot be trusted."""


class ClassificationError(InconsistencyError):
    """A classifier could not validate its own answer."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InfeasibleError(ValidationError):
    """The requested generator parameters cannot be realised."""


class UnsupportedError(SphereMapError):
    """The operation is not defined for this input (e.g. target dimension 1)."""
