from enum import Enum


class EstimationPath(str, Enum):
    """Which closed form produced an error statistic."""

    GENERAL = "GENERAL"
    REDUCED_ZERO_PROCESS_NOISE = "REDUCED_ZERO_PROCESS_NOISE"


class Target(str, Enum):
    """State addressed by a mmse bound."""

    X0 = "x0"
    XK = "xk"


class PlacementStatus(str, Enum):
    OK = "OK"
    BUDGET_INFEASIBLE = "BUDGET_INFEASIBLE"


class PlacementMode(str, Enum):
    P1 = "p1"
    P2 = "p2"


class UpdateMode(str, Enum):
    """How candidate marginal gains are evaluated."""

    RANK_ONE = "rank_one"
    REFACTOR = "refactor"


class GeneratorKind(str, Enum):
    CHAIN = "chain"
    GRID = "grid"
    RANDOM = "random"
