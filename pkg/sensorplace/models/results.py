import math
import typing as t

from pydantic import BaseModel, ConfigDict, Field

from .components import SensorSet
from .enums import EstimationPath, PlacementStatus, Target


class ErrorReport(BaseModel):
    """Error statistics of the optimal linear estimator for one sensor set."""

    logdet_error: float
    """Natural log-det of the error covariance."""
    mmse_z: float
    """Trace of the error covariance of the estimated vector."""
    mmse_x0: float
    mmse_xk: float
    path: EstimationPath

    model_config = ConfigDict(frozen=True)


class BoundsReport(BaseModel):
    """Lower and upper mmse bounds for x_0 or x_k."""

    target: Target
    lower: float
    upper: float
    l_i: float
    u_i: float
    vacuous: bool = False
    """
    True when l_i is structurally zero and the lower bound carries no
    information (reported as 0).
    """

    model_config = ConfigDict(frozen=True)


class TraceStep(BaseModel):
    iter: int
    selected: int
    """1-based index added in this iteration."""
    logdet: float
    """Objective value after the addition."""
    gain: float
    """Reduction of the objective achieved by the addition."""

    model_config = ConfigDict(frozen=True)


class PlacementResult(BaseModel):
    """Outcome of a greedy placement run."""

    chosen: SensorSet
    selection_order: t.List[int] = Field(default_factory=list)
    achieved_logdet: float
    trace: t.List[TraceStep] = Field(default_factory=list)
    guarantee: t.Optional[float] = None
    """
    P1: the cardinality factor F. P2: the factor 1 - exp(-l/r) that
    multiplies the optimum in the value guarantee.
    """
    guarantee_complement: t.Optional[float] = None
    """
    P2 only: exp(-l/r), the weight of the empty-set value.
    """
    guarantee_tight: t.Optional[float] = None
    """
    P1 only: cardinality factor using the value of the penultimate
    greedy set instead of the budget.
    """
    status: PlacementStatus = PlacementStatus.OK
    evaluations: int = 0
    """Number of marginal-gain evaluations performed."""

    model_config = ConfigDict(frozen=True)

    def p2_bound(self, optimum: float, empty: float) -> float:
        """Right side of the value guarantee for a P2 run.

        Args:
            optimum (float): Best value over sets of the budgeted size.
            empty (float): Value with no sensors.
        """
        if self.guarantee is None or self.guarantee_complement is None:
            raise ValueError("Result carries no value guarantee")
        return self.guarantee * optimum + self.guarantee_complement * empty

    def to_output(self) -> t.Dict[str, t.Any]:
        """Documented JSON shape of a placement result."""
        return {
            "chosen": self.chosen.values(),
            "selection_order": list(self.selection_order),
            "achieved_logdet": self.achieved_logdet,
            "trace": [step.model_dump() for step in self.trace],
            "guarantee": self.guarantee,
            "guarantee_tight": self.guarantee_tight,
            "status": self.status.value,
            "evaluations": self.evaluations,
        }


def p2_factors(r: int, l: int) -> t.Tuple[float, float]:
    ratio = math.exp(-l / r)
    return 1.0 - ratio, ratio
