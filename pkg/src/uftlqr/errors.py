"""Exception hierarchy for the uftlqr package."""


class UftlqrError(Exception):
    """Base class for all package errors."""


class BranchCutViolation(UftlqrError):
    """A frequency point lies on (or within tolerance of) a branch cut ray."""


class InadmissibleContour(UftlqrError):
    """A deformation contour fails its admissibility requirements."""


class QuadratureFailure(UftlqrError):
    """Adaptive quadrature exhausted its budget without meeting tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class OverflowGuard(UftlqrError):
    """A bare exponential factor would overflow; use a premultiplied path."""


class StepSizeUnderflow(UftlqrError):
    """An ODE integration produced non-finite values or an unusable step."""


class NewtonDivergence(UftlqrError):
    """Newton iteration for the algebraic Riccati equation stalled."""


class LinearSolveFailure(UftlqrError):
    """A linear system solve failed (singular or non-finite factorization)."""


class GridMismatch(UftlqrError):
    """Two fields live on different grids and no resampling was requested."""


class InsufficientStateResolution(UftlqrError):
    """A supplied state sample grid is too coarse for the requested accuracy."""


class ConfigError(UftlqrError):
    """Invalid scenario configuration; `path` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class IoError(UftlqrError):
    """File emission failed."""
