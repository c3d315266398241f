"""Exception types shared across the package."""


class SubpadeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SubpadeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleProximity(SubpadeError):
    """Evaluation was requested too close to a pole of the rational function."""


class ConvergenceFailure(SubpadeError):
    """An adaptive quadrature did not reach the requested tolerance."""


class RootConvergenceFailure(SubpadeError):
    """Simultaneous root refinement stalled before reaching its residual target."""


class ValidationFailure(SubpadeError):
    """A structural guarantee (distinct poles, half-plane location, ...) failed."""


class SingularShift(SubpadeError):
    """A shifted solve (mu + A) detected rank deficiency."""


class TransformEvaluationError(SubpadeError):
    """A user-supplied Laplace transform could not be evaluated."""


class InsufficientData(SubpadeError):
    """A study produced fewer usable data points than required."""
