import os
import typing as t

from pydantic import BaseModel, Field as PydanticField

from ..const import (
    SUPERMODULAR_SLACK,
    THREADS_ENV,
    TIE_TOLERANCE,
)
from .enums import UpdateMode


def _default_threads() -> int:
    return os.cpu_count() or 1


class RunConfiguration(BaseModel):
    """
    Runtime knobs shared by placement, oracle and the CLI.

    Example:
        ```python
        config = RunConfiguration.from_env(threads=4, lazy=True)
        result = greedy_p2(system, atoms, r=2, config=config)
        ```
    """

    threads: int = PydanticField(default_factory=_default_threads, ge=1)
    """
    Worker threads for candidate evaluation and oracle enumeration.
    Results do not depend on this value.
    """
    lazy: bool = False
    """
    Use lazy (priority queue) marginal-gain evaluation in greedy runs.
    """
    update: UpdateMode = UpdateMode.RANK_ONE
    """
    Candidate evaluation strategy: Cholesky rank-one update chain or a
    full re-factorization.
    """
    tie_tolerance: float = TIE_TOLERANCE
    """
    Gains within this absolute distance of the best count as ties; the
    smallest sensor index wins.
    """
    supermodular_slack: float = SUPERMODULAR_SLACK
    """
    Slack allowed by the exhaustive monotonicity and supermodularity checks.
    """
    seed: t.Optional[int] = None
    """
    Seed for randomized generators and the random-sample baseline.
    """

    @classmethod
    def from_env(cls, **overrides: t.Any) -> "RunConfiguration":
        """Resolve configuration from the environment, then apply overrides.

        `SENSOR_PLACE_THREADS` is used when `threads` is not overridden.
        """
        values: t.Dict[str, t.Any] = {}
        env_threads = os.getenv(THREADS_ENV)
        if env_threads:
            values["threads"] = int(env_threads)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
