"""Exception types shared across the package."""


class KruskalCmcError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KruskalCmcError, ValueError):
    """Input outside the mathematical domain of an operation."""


class BeyondSingularityError(DomainError):
    """Kruskal point with X^2 - T^2 < -2M, i.e. past the r=0 singularity."""


class NonSpacelikeError(DomainError):
    """A jet or sample pair violates the spacelike condition."""


class HorizonError(DomainError):
    """Schwarzschild-coordinate operation evaluated at r = 2M."""


class NoSliceError(DomainError):
    """No slice exists for the requested (M, H, c); message names the valid range."""


class BracketError(KruskalCmcError, ValueError):
    """Root bracketing failed (no sign change, or expansion exhausted)."""


class AccuracyError(KruskalCmcError, ArithmeticError):
    """Requested tolerance not met; carries the best estimate found."""

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class StepUnderflowError(KruskalCmcError, ArithmeticError):
    """ODE step size underflowed; carries the partial trajectory."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PropagationError(KruskalCmcError, RuntimeError):
    """Slice construction failed part-way; carries diagnostics."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InvalidCurveError(KruskalCmcError, ValueError):
    """Foliation curve parameters violate the strict-decrease certificate."""
