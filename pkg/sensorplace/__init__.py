from .core.estimation import LogdetObjective, mmse_report
from .core.placement import greedy_p1, greedy_p2
from .core.stacked import atoms_for
from .core.system import validate

from .models import (
    LtvSystem,
    SensorSet,
    PlacementResult,
    ErrorReport,
    BoundsReport,
    RunConfiguration,
)

from .errors import SensorPlacementError

__all__ = [
    "LogdetObjective",
    "mmse_report",
    "greedy_p1",
    "greedy_p2",
    "atoms_for",
    "validate",
    "LtvSystem",
    "SensorSet",
    "PlacementResult",
    "ErrorReport",
    "BoundsReport",
    "RunConfiguration",
    "SensorPlacementError",
]
