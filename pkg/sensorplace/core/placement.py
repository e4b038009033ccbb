import heapq
import logging
import math
import time
import typing as t
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from ..common.util import ProgressLogger
from ..errors import DegenerateBudget, InvalidBudget
from ..models.components import SensorSet
from ..models.configs import RunConfiguration
from ..models.enums import PlacementStatus
from ..models.results import PlacementResult, TraceStep, p2_factors
from ..models.system import LtvSystem
from .estimation import LogdetObjective
from .stacked import InformationAtoms

log = logging.getLogger(__name__)


class GreedySelector:
    """
    Grows a sensor set one element at a time by largest marginal gain.

    Ties (gains within `config.tie_tolerance` of the best) go to the
    smallest index. The lazy mode keeps stale gains as upper bounds in a
    heap and only re-evaluates entries that could still win; it selects
    the same sequence as the eager mode.
    """

    def __init__(
        self,
        objective: LogdetObjective,
        config: t.Optional[RunConfiguration] = None,
        logger: t.Optional[logging.Logger] = None,
    ):
        self.objective = objective
        self.config = config or RunConfiguration()
        self.logger = logger or log
        self.n = objective.n
        self.selected: t.List[int] = []
        self.current = SensorSet(())
        self.value = objective.value(self.current)
        self.values: t.List[float] = [self.value]
        self.trace: t.List[TraceStep] = []
        self.evaluations = 0
        self._stamp = 0
        self._heap: t.List[t.Tuple[float, int, int]] = []
        self._base: t.Optional[t.Tuple[np.ndarray, np.ndarray]] = None
        self._pool: t.Optional[ThreadPoolExecutor] = None

    def __enter__(self) -> "GreedySelector":
        return self

    def __exit__(self, *exc: t.Any):
        self.close()

    def close(self):
        """Shut down the worker pool, if one was started."""
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    @property
    def pool(self) -> ThreadPoolExecutor:
        """Worker pool shared by every evaluation of this selector."""
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.config.threads)
        return self._pool

    @property
    def remaining(self) -> t.List[int]:
        return [i for i in range(1, self.n + 1) if i not in self.current]

    def _base_factor(self) -> t.Tuple[np.ndarray, np.ndarray]:
        if self._base is None:
            self._base = (
                self.objective.factor(self.current),
                self.objective.information(self.current),
            )
        return self._base

    def _gain(self, sensor: int) -> float:
        factor, information = self._base_factor()
        candidate = self.objective.value_with(
            factor, information, sensor, update=self.config.update
        )
        return self.value - candidate

    def _evaluate(self, sensors: t.List[int]) -> t.List[float]:
        """Gains in the order of `sensors`."""
        self._base_factor()
        self.evaluations += len(sensors)
        if self.config.threads > 1 and len(sensors) > 1:
            return list(self.pool.map(self._gain, sensors))
        return [self._gain(s) for s in sensors]

    def _pick(self, gains: t.Sequence[t.Tuple[int, float]]) -> t.Tuple[int, float]:
        best = max(g for _, g in gains)
        winner = min(
            s for s, g in gains if g >= best - self.config.tie_tolerance
        )
        return winner, dict(gains)[winner]

    def _eager_step(self) -> t.Tuple[int, float]:
        candidates = self.remaining
        return self._pick(list(zip(candidates, self._evaluate(candidates))))

    def _refresh(self, entries: t.List[t.Tuple[float, int, int]]):
        sensors = [s for _, s, _ in entries]
        for sensor, gain in zip(sensors, self._evaluate(sensors)):
            heapq.heappush(self._heap, (-gain, sensor, self._stamp))

    def _lazy_step(self) -> t.Tuple[int, float]:
        if not self._heap and self._stamp == 0:
            candidates = self.remaining
            self._heap = [
                (-g, s, 0) for s, g in zip(candidates, self._evaluate(candidates))
            ]
            heapq.heapify(self._heap)
        tol = self.config.tie_tolerance
        while True:
            while self._heap[0][2] != self._stamp:
                self._refresh([heapq.heappop(self._heap)])
            best = -self._heap[0][0]
            # stale bounds that could still tie or beat the fresh top
            stale = [
                e for e in self._heap if e[2] != self._stamp and -e[0] >= best - tol
            ]
            if not stale:
                break
            self._heap = [e for e in self._heap if e not in stale]
            heapq.heapify(self._heap)
            self._refresh(stale)
        fresh = [(s, -g) for g, s, stamp in self._heap if stamp == self._stamp]
        winner, gain = self._pick(fresh)
        self._heap = [e for e in self._heap if e[1] != winner]
        heapq.heapify(self._heap)
        return winner, gain

    def step(self) -> TraceStep:
        """Add the best remaining sensor and refactor the new set from scratch."""
        if self.config.lazy:
            sensor, _ = self._lazy_step()
        else:
            sensor, _ = self._eager_step()
        previous = self.value
        self.current = self.current.with_sensor(sensor)
        self.selected.append(sensor)
        self.value = self.objective.value(self.current)
        self.values.append(self.value)
        self._base = None
        self._stamp += 1
        step = TraceStep(
            iter=len(self.selected),
            selected=sensor,
            logdet=self.value,
            gain=previous - self.value,
        )
        self.trace.append(step)
        return step

    def result(self, **extra: t.Any) -> PlacementResult:
        return PlacementResult(
            chosen=self.current,
            selection_order=list(self.selected),
            achieved_logdet=self.value,
            trace=list(self.trace),
            evaluations=self.evaluations,
            **extra,
        )


def guarantee_factor_p1(logdet_empty: float, logdet_full: float, R: float) -> float:
    """
    Cardinality factor F: |S_greedy| <= F |S*| for budget R.

    Raises:
        DegenerateBudget: R <= logdet_full.
    """
    if R <= logdet_full:
        raise DegenerateBudget(
            f"Budget {R:.6g} does not exceed the full-set value {logdet_full:.6g}"
        )
    spread = logdet_empty - logdet_full
    if spread <= 0.0:
        return 1.0
    return 1.0 + math.log(spread / (R - logdet_full))


def tight_guarantee_factor_p1(
    logdet_empty: float, logdet_full: float, logdet_penultimate: float
) -> float:
    """F evaluated at the value of the last greedy set still above budget."""
    return guarantee_factor_p1(logdet_empty, logdet_full, logdet_penultimate)


def greedy_p1(
    system: LtvSystem,
    atoms: InformationAtoms,
    R: float,
    config: t.Optional[RunConfiguration] = None,
    objective: t.Optional[LogdetObjective] = None,
) -> PlacementResult:
    """
    Fewest sensors whose log-det error meets the budget R.

    Returns the full set with status `BUDGET_INFEASIBLE` when even all
    n sensors stay above R.
    """
    if not math.isfinite(R):
        raise InvalidBudget(f"Budget must be finite, got {R}")
    objective = objective or LogdetObjective(system, atoms)
    progress = ProgressLogger("greedy p1 step", log)
    with GreedySelector(objective, config) as selector:
        while selector.value > R and len(selector.selected) < system.n:
            step = selector.step()
            progress.log(1, f"sensor {step.selected} logdet {step.logdet:.6g}")

    status = PlacementStatus.OK
    if selector.value > R:
        status = PlacementStatus.BUDGET_INFEASIBLE
        log.warning(
            f"Budget {R:.6g} below the full-set value {selector.value:.6g}"
        )

    logdet_empty = selector.values[0]
    logdet_full = (
        selector.value
        if len(selector.selected) == system.n
        else objective.value(SensorSet.full(system.n))
    )
    guarantee = tight = None
    if R > logdet_full:
        guarantee = guarantee_factor_p1(logdet_empty, logdet_full, R)
        if selector.selected:
            tight = tight_guarantee_factor_p1(
                logdet_empty, logdet_full, selector.values[-2]
            )
    return selector.result(
        guarantee=guarantee,
        guarantee_tight=tight,
        status=status,
    )


def greedy_p2(
    system: LtvSystem,
    atoms: InformationAtoms,
    r: int,
    l: t.Optional[int] = None,
    config: t.Optional[RunConfiguration] = None,
    objective: t.Optional[LogdetObjective] = None,
) -> PlacementResult:
    """
    l greedy additions for a cardinality budget r (l defaults to r).

    The result carries the factor pair (1 - e^(-l/r), e^(-l/r)) of the
    value guarantee; see `PlacementResult.p2_bound`.

    Raises:
        InvalidBudget: Unless 1 <= r <= l <= n.
    """
    l = r if l is None else l
    if r < 1 or r > system.n:
        raise InvalidBudget(f"r must lie in 1..{system.n}, got {r}")
    if l < r or l > system.n:
        raise InvalidBudget(f"l must lie in {r}..{system.n}, got {l}")
    objective = objective or LogdetObjective(system, atoms)
    progress = ProgressLogger("greedy p2 step", log)
    with GreedySelector(objective, config) as selector:
        for _ in range(l):
            step = selector.step()
            progress.log(1, f"sensor {step.selected} logdet {step.logdet:.6g}")
    factor, complement = p2_factors(r, l)
    return selector.result(guarantee=factor, guarantee_complement=complement)


def sweep_p2(
    system: LtvSystem,
    atoms: InformationAtoms,
    budgets: t.Iterable[int],
    config: t.Optional[RunConfiguration] = None,
) -> pd.DataFrame:
    """Greedy value and runtime per cardinality budget.

    Columns: r, logdet, runtime_ms.
    """
    objective = LogdetObjective(system, atoms)
    rows = []
    for r in budgets:
        start = time.perf_counter()
        if r == 0:
            value = objective.value(SensorSet(()))
        else:
            value = greedy_p2(
                system, atoms, r, config=config, objective=objective
            ).achieved_logdet
        rows.append(
            {"r": r, "logdet": value, "runtime_ms": (time.perf_counter() - start) * 1e3}
        )
    return pd.DataFrame(rows, columns=["r", "logdet", "runtime_ms"])


def sweep_p1(
    system: LtvSystem,
    atoms: InformationAtoms,
    budgets: t.Iterable[float],
    config: t.Optional[RunConfiguration] = None,
) -> pd.DataFrame:
    """Greedy sensor count per log-det budget.

    Columns: budget, sensors, logdet, runtime_ms.
    """
    objective = LogdetObjective(system, atoms)
    rows = []
    for R in budgets:
        start = time.perf_counter()
        result = greedy_p1(system, atoms, R, config=config, objective=objective)
        rows.append(
            {
                "budget": R,
                "sensors": len(result.chosen),
                "logdet": result.achieved_logdet,
                "runtime_ms": (time.perf_counter() - start) * 1e3,
            }
        )
    return pd.DataFrame(rows, columns=["budget", "sensors", "logdet", "runtime_ms"])
