class SensorPlacementError(Exception):
    pass


class SystemValidationError(SensorPlacementError):
    pass


class NotPositiveDefinite(SystemValidationError):
    """Raised when a covariance fails the symmetry or Cholesky test."""

    def __init__(self, matrix: str, reason: str = "not positive definite"):
        self.matrix = matrix
        super().__init__(f"{matrix} is {reason}")


class NonPositiveSigma(SystemValidationError):
    pass


class DimensionMismatch(SystemValidationError):
    pass


class InvalidCoupling(SensorPlacementError):
    pass


class InvalidSensorSet(SensorPlacementError):
    pass


class ZeroProcessNoise(SensorPlacementError):
    pass


class CholeskyFailure(SensorPlacementError):
    pass


class ExcludedDomainError(SensorPlacementError):
    pass


class MuEqualsOne(ExcludedDomainError):
    pass


class MuEqualsZero(ExcludedDomainError):
    pass


class InfeasibleAlpha(SensorPlacementError):
    pass


class InvalidBudget(SensorPlacementError):
    pass


class DegenerateBudget(SensorPlacementError):
    pass


class TooLarge(SensorPlacementError):
    pass


class Infeasible(SensorPlacementError):
    pass
