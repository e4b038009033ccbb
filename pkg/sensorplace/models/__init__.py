from .components import SensorSet
from .system import LtvSystem, NoisePriorSummary, Loadable
from .results import (
    ErrorReport,
    BoundsReport,
    TraceStep,
    PlacementResult,
)
from .configs import RunConfiguration
from .enums import (
    EstimationPath,
    Target,
    PlacementStatus,
    PlacementMode,
    UpdateMode,
    GeneratorKind,
)


__all__ = [
    "SensorSet",
    "LtvSystem",
    "NoisePriorSummary",
    "Loadable",
    "ErrorReport",
    "BoundsReport",
    "TraceStep",
    "PlacementResult",
    "RunConfiguration",
    "EstimationPath",
    "Target",
    "PlacementStatus",
    "PlacementMode",
    "UpdateMode",
    "GeneratorKind",
]
