import math
import unittest

from pydantic import ValidationError

from ..models import (
    PlacementResult,
    PlacementStatus,
    RunConfiguration,
    SensorSet,
    TraceStep,
    UpdateMode,
)
from ..models.results import p2_factors


class TestPlacementResult(unittest.TestCase):
    def test_output_shape(self):
        result = PlacementResult(
            chosen=SensorSet.of([5, 3], 5),
            selection_order=[5, 3],
            achieved_logdet=-20.0,
            trace=[
                TraceStep(iter=1, selected=5, logdet=-12.0, gain=12.0),
                TraceStep(iter=2, selected=3, logdet=-20.0, gain=8.0),
            ],
            guarantee=1.5,
        )
        payload = result.to_output()
        self.assertEqual(payload["chosen"], [3, 5])
        self.assertEqual(payload["selection_order"], [5, 3])
        self.assertEqual(payload["status"], "OK")
        self.assertEqual(payload["trace"][1]["selected"], 3)

    def test_value_guarantee(self):
        factor, complement = p2_factors(2, 2)
        self.assertAlmostEqual(factor, 1 - 1 / math.e)
        self.assertAlmostEqual(factor + complement, 1.0)
        result = PlacementResult(
            chosen=SensorSet.of([1, 2], 2),
            achieved_logdet=-3.0,
            guarantee=factor,
            guarantee_complement=complement,
        )
        self.assertAlmostEqual(result.p2_bound(-4.0, 0.0), -4.0 * factor)

    def test_p1_result_has_no_value_guarantee(self):
        result = PlacementResult(
            chosen=SensorSet(()),
            achieved_logdet=0.0,
            status=PlacementStatus.BUDGET_INFEASIBLE,
        )
        with self.assertRaises(ValueError):
            result.p2_bound(-1.0, 0.0)


class TestSensorSetModel(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValidationError):
            SensorSet((3, 1))
        with self.assertRaises(ValidationError):
            SensorSet((0,))
        self.assertEqual(SensorSet.full(3).values(), [1, 2, 3])


class TestRunConfiguration(unittest.TestCase):
    def test_defaults(self):
        config = RunConfiguration()
        self.assertGreaterEqual(config.threads, 1)
        self.assertFalse(config.lazy)
        self.assertEqual(config.update, UpdateMode.RANK_ONE)
        self.assertEqual(config.tie_tolerance, 1e-12)

    def test_overrides_skip_none(self):
        config = RunConfiguration.from_env(threads=2, lazy=None, update="refactor")
        self.assertEqual(config.threads, 2)
        self.assertFalse(config.lazy)
        self.assertEqual(config.update, UpdateMode.REFACTOR)

    def test_threads_positive(self):
        with self.assertRaises(ValidationError):
            RunConfiguration(threads=0)
