import logging
import typing as t
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..common.util import ProgressLogger
from ..const import ORACLE_MAX_N, SUPERMODULAR_SLACK
from ..errors import Infeasible, InvalidBudget, TooLarge
from ..models.components import SensorSet
from ..models.configs import RunConfiguration
from ..models.system import LtvSystem
from .estimation import LogdetObjective
from .stacked import InformationAtoms

log = logging.getLogger(__name__)

_CHUNK = 256


class OracleTable(BaseModel):
    """Log-det error of every subset, indexed by bitmask (bit i is sensor i+1)."""

    n: int
    values: np.ndarray
    """Array of length 2^n."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def entry(self, mask: int) -> float:
        return float(self.values[mask])

    def value(self, S: SensorSet) -> float:
        return self.entry(S.mask)

    def __len__(self) -> int:
        return len(self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"bitmask": np.arange(len(self.values)), "logdet": self.values}
        )


class Violation(BaseModel):
    """A triple breaking diminishing returns (or a pair breaking monotonicity)."""

    subset: SensorSet
    superset: SensorSet
    element: t.Optional[int] = None
    excess: float
    """How far the inequality is missed, beyond the slack."""

    model_config = ConfigDict(frozen=True)


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def enumerate_all(
    system: LtvSystem,
    atoms: InformationAtoms,
    config: t.Optional[RunConfiguration] = None,
) -> OracleTable:
    """
    Evaluate the objective on all 2^n subsets.

    Bitmask ranges are spread over `config.threads` workers and assembled
    in ascending order.

    Raises:
        TooLarge: n above `ORACLE_MAX_N`.
    """
    n = system.n
    if n > ORACLE_MAX_N:
        raise TooLarge(f"Exhaustive enumeration is capped at n={ORACLE_MAX_N}, got {n}")
    config = config or RunConfiguration()
    objective = LogdetObjective(system, atoms)
    total = 1 << n
    progress = ProgressLogger("oracle subsets", log)
    progress.reset("oracle subsets", show_memory=True)

    def evaluate(start: int) -> np.ndarray:
        stop = min(start + _CHUNK, total)
        return np.array(
            [objective.value(SensorSet.from_mask(m)) for m in range(start, stop)]
        )

    starts = list(range(0, total, _CHUNK))
    values = np.empty(total)
    if config.threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = pool.map(evaluate, starts)
            for start, chunk in zip(starts, chunks):
                values[start : start + len(chunk)] = chunk
                progress.log(len(chunk))
    else:
        for start in starts:
            chunk = evaluate(start)
            values[start : start + len(chunk)] = chunk
            progress.log(len(chunk))
    values.setflags(write=False)
    return OracleTable(n=n, values=values)


def optimal_p1(table: OracleTable, R: float) -> SensorSet:
    """
    Smallest subset meeting the budget; ties go to the smallest bitmask.

    Raises:
        Infeasible: No subset reaches R.
    """
    for mask in sorted(range(len(table)), key=lambda m: (_popcount(m), m)):
        if table.entry(mask) <= R:
            return SensorSet.from_mask(mask)
    raise Infeasible(f"No sensor set reaches the budget {R:.6g}")


def optimal_p2(
    table: OracleTable, r: int, exact_cardinality: bool = False
) -> SensorSet:
    """
    Value-minimizing subset with at most r sensors, or exactly r when
    `exact_cardinality` is set. Ties go to the smallest bitmask.
    """
    if r < 0 or r > table.n:
        raise InvalidBudget(f"r must lie in 0..{table.n}, got {r}")
    best_mask = -1
    best = np.inf
    for mask in range(len(table)):
        size = _popcount(mask)
        if size > r or (exact_cardinality and size != r):
            continue
        value = table.entry(mask)
        if value < best:
            best, best_mask = value, mask
    return SensorSet.from_mask(best_mask)


def verify_supermodularity(
    table: OracleTable, slack: float = SUPERMODULAR_SLACK
) -> t.List[Violation]:
    """
    Check diminishing error reduction over every S <= S' and a not in S':
    h(S) - h(S + a) >= h(S') - h(S' + a) - slack.

    The triple count grows like n 3^(n-1).
    """
    violations: t.List[Violation] = []
    values = table.values
    for outer in range(len(table)):
        for a in range(table.n):
            bit = 1 << a
            if outer & bit:
                continue
            outer_gain = values[outer] - values[outer | bit]
            sub = outer
            while True:
                gain = values[sub] - values[sub | bit]
                if gain < outer_gain - slack:
                    violations.append(
                        Violation(
                            subset=SensorSet.from_mask(sub),
                            superset=SensorSet.from_mask(outer),
                            element=a + 1,
                            excess=float(outer_gain - slack - gain),
                        )
                    )
                if sub == 0:
                    break
                sub = (sub - 1) & outer
    if violations:
        log.warning(f"{len(violations)} supermodularity violations")
    return violations


def verify_monotonicity(
    table: OracleTable, slack: float = SUPERMODULAR_SLACK
) -> t.List[Violation]:
    """Check h(S + a) <= h(S) + slack for every S and a not in S."""
    violations: t.List[Violation] = []
    values = table.values
    for mask in range(len(table)):
        for a in range(table.n):
            bit = 1 << a
            if mask & bit:
                continue
            excess = values[mask | bit] - values[mask] - slack
            if excess > 0:
                violations.append(
                    Violation(
                        subset=SensorSet.from_mask(mask),
                        superset=SensorSet.from_mask(mask | bit),
                        element=a + 1,
                        excess=float(excess),
                    )
                )
    return violations


def random_baseline(
    objective: LogdetObjective,
    r: int,
    samples: int,
    seed: t.Optional[int] = None,
) -> t.Tuple[SensorSet, float]:
    """Best of `samples` uniformly drawn r-subsets."""
    n = objective.n
    if r < 0 or r > n:
        raise InvalidBudget(f"r must lie in 0..{n}, got {r}")
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    rng = np.random.default_rng(seed)
    best_set = SensorSet(())
    best = np.inf
    for _ in range(samples):
        S = SensorSet.from_zero_based(rng.choice(n, size=r, replace=False), n)
        value = objective.value(S)
        if value < best:
            best, best_set = value, S
    return best_set, float(best)
