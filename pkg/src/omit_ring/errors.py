"""Exception hierarchy shared across the package."""


class OmitRingError(Exception):
    """Base class for all package errors."""


class ValidationError(OmitRingError):
    """A parameter or configuration value violates its contract."""


class SolverError(OmitRingError):
    """A numerical solve failed (singular system, non-convergence, ...)."""


class SingularSystemError(SolverError):
    """Linear system is singular or numerically degenerate."""


class ConvergenceError(SolverError):
    """Iterative solver exhausted its iteration budget."""


class StepInstabilityError(SolverError):
    """Finite-difference result does not pass its step-halving check."""


class ShapeError(SolverError):
    """A spectrum does not have the structure an analysis step requires."""


class UnsettledTrajectoryError(SolverError):
    """Time-domain trajectory has not settled enough for demodulation."""
