import unittest

import numpy as np

from ..core.estimation import LogdetObjective
from ..core.oracle import (
    OracleTable,
    enumerate_all,
    optimal_p1,
    optimal_p2,
    random_baseline,
    verify_monotonicity,
    verify_supermodularity,
)
from ..core.stacked import atoms_for
from ..core.system import gen_random_system, prior_covariance_z
from ..common.linalg import spd_logdet
from ..errors import Infeasible, InvalidBudget, TooLarge
from ..models import RunConfiguration, SensorSet
from .support.fixtures import demo_chain, random_subset, random_systems, scalar_system

SERIAL = RunConfiguration(threads=1)


class TestEnumeration(unittest.TestCase):
    def test_single_sensor(self):
        system = scalar_system()
        table = enumerate_all(system, atoms_for(system), SERIAL)
        self.assertEqual(len(table), 2)
        self.assertAlmostEqual(table.entry(0), spd_logdet(prior_covariance_z(system)))
        self.assertAlmostEqual(table.entry(1), np.log(0.5))

    def test_chain_table(self):
        system = demo_chain()
        table = enumerate_all(system, atoms_for(system), SERIAL)
        self.assertEqual(len(table), 32)
        self.assertLess(abs(table.entry(31) + 31.0), 0.5)
        self.assertTrue(np.all(table.values <= table.entry(0)))
        frame = table.to_frame()
        self.assertEqual(list(frame.columns), ["bitmask", "logdet"])
        self.assertEqual(frame["bitmask"].tolist(), list(range(32)))

    def test_thread_count_does_not_matter(self):
        system = gen_random_system(9, 1, seed=3)
        atoms = atoms_for(system)
        serial = enumerate_all(system, atoms, SERIAL)
        threaded = enumerate_all(system, atoms, RunConfiguration(threads=4))
        np.testing.assert_array_equal(serial.values, threaded.values)

    def test_size_cap(self):
        system = gen_random_system(21, 0, seed=1)
        with self.assertRaises(TooLarge):
            enumerate_all(system, atoms_for(system), SERIAL)


class TestOptima(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        system = demo_chain()
        cls.table = enumerate_all(system, atoms_for(system), SERIAL)

    def test_p1(self):
        self.assertEqual(len(optimal_p1(self.table, self.table.entry(0))), 0)
        pair = SensorSet.of([2, 4], 5)
        best = optimal_p1(self.table, self.table.value(pair))
        self.assertEqual(len(best), 2)
        pairs = [m for m in range(32) if bin(m).count("1") == 2]
        best_pair = min(pairs, key=lambda m: (self.table.entry(m), m))
        self.assertEqual(SensorSet.from_mask(best_pair).values(), [3, 5])

    def test_p1_infeasible(self):
        with self.assertRaises(Infeasible):
            optimal_p1(self.table, self.table.entry(31) - 1.0)

    def test_p2(self):
        self.assertEqual(len(optimal_p2(self.table, 0)), 0)
        self.assertEqual(optimal_p2(self.table, 5), SensorSet.full(5))
        self.assertEqual(optimal_p2(self.table, 2).values(), [3, 5])
        with self.assertRaises(InvalidBudget):
            optimal_p2(self.table, 6)

    def test_ties_go_to_smallest_mask(self):
        table = OracleTable(n=2, values=np.array([0.0, -1.0, -1.0, -2.0]))
        self.assertEqual(optimal_p2(table, 1).values(), [1])
        self.assertEqual(optimal_p1(table, -1.0).values(), [1])


class TestSetFunctionChecks(unittest.TestCase):
    def test_random_systems_are_supermodular(self):
        for system in random_systems(20, seed=4, n_range=(4, 4), k_range=(0, 3)):
            table = enumerate_all(system, atoms_for(system), SERIAL)
            self.assertEqual(verify_supermodularity(table), [])
            self.assertEqual(verify_monotonicity(table), [])

    def test_chain_and_trivial(self):
        for system in (demo_chain(), scalar_system()):
            table = enumerate_all(system, atoms_for(system), SERIAL)
            self.assertEqual(verify_supermodularity(table), [])
            self.assertEqual(verify_monotonicity(table), [])

    def test_random_triples(self):
        rng = np.random.default_rng(6)
        for system in random_systems(4, seed=6, n_range=(6, 6), k_range=(1, 3)):
            objective = LogdetObjective(system, atoms_for(system))
            for _ in range(250):
                superset = random_subset(rng, 6)
                outside = [i for i in range(1, 7) if i not in superset]
                if not outside:
                    continue
                a = int(rng.choice(outside))
                subset = [i for i in superset if rng.random() < 0.5]
                S = SensorSet.of(subset, 6)
                T = SensorSet.of(superset, 6)
                small_gain = objective.value(S) - objective.value(S.with_sensor(a))
                large_gain = objective.value(T) - objective.value(T.with_sensor(a))
                self.assertGreaterEqual(small_gain, large_gain - 1e-9)
                self.assertGreaterEqual(large_gain, -1e-9)

    def test_detects_violations(self):
        # gain of sensor 2 grows once sensor 1 is placed
        table = OracleTable(n=2, values=np.array([0.0, -1.0, -1.0, -3.0]))
        violations = verify_supermodularity(table)
        self.assertEqual(len(violations), 2)
        self.assertEqual({v.element for v in violations}, {1, 2})
        self.assertAlmostEqual(violations[0].excess, 1.0 - 1e-9)

        rising = OracleTable(n=1, values=np.array([0.0, 0.5]))
        [violation] = verify_monotonicity(rising)
        self.assertEqual(violation.superset.values(), [1])


class TestRandomBaseline(unittest.TestCase):
    def test_sizes_and_optimum(self):
        system = demo_chain()
        atoms = atoms_for(system)
        table = enumerate_all(system, atoms, SERIAL)
        objective = LogdetObjective(system, atoms)
        for r in range(0, 6):
            S, value = random_baseline(objective, r, 10, seed=1)
            self.assertEqual(len(S), r)
            self.assertEqual(value, objective.value(S))
            best = table.value(optimal_p2(table, r, exact_cardinality=True))
            self.assertGreaterEqual(value, best - 1e-12)

    def test_reproducible(self):
        system = gen_random_system(6, 2, seed=5)
        objective = LogdetObjective(system, atoms_for(system))
        self.assertEqual(
            random_baseline(objective, 3, 5, seed=9),
            random_baseline(objective, 3, 5, seed=9),
        )
