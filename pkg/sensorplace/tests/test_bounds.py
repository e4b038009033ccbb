import itertools
import math
import unittest

import numpy as np

from ..core.bounds import (
    corollary1_min_sensors,
    corollary2_min_interval,
    empty_set_logdet_bound,
    theorem1_bounds,
)
from ..core.estimation import LogdetObjective, mmse_report
from ..core.stacked import atoms_for
from ..core.system import build_system, noise_prior_summary
from ..errors import InfeasibleAlpha, MuEqualsOne, MuEqualsZero
from ..models import SensorSet, Target
from ..models.system import NoisePriorSummary
from .support.fixtures import demo_chain, random_systems, scalar_system

HALF = NoisePriorSummary(sigma0_sq=1.0, sigma0_inv_sq=1.0, sigmaw_sq=1.0, mu=0.5)


class TestTheorem1(unittest.TestCase):
    def test_scalar_x0(self):
        system = scalar_system()
        atoms = atoms_for(system)
        S = SensorSet.of([1], 1)
        report = theorem1_bounds(
            noise_prior_summary(system), atoms.maps, S, Target.X0, system.sigma
        )
        self.assertAlmostEqual(report.lower, 0.5)
        self.assertAlmostEqual(report.upper, 1.0)
        self.assertEqual(report.l_i, 1.0)
        actual = mmse_report(system, atoms, S).mmse_x0
        self.assertLessEqual(report.lower, actual + 1e-12)
        self.assertLessEqual(actual, report.upper + 1e-12)

    def test_empty_set_collapses(self):
        system = build_system(np.eye(3) * 0.5, 2, x0_variance=2.0, sigma=1.5)
        report = theorem1_bounds(
            noise_prior_summary(system),
            atoms_for(system).maps,
            SensorSet(()),
            Target.X0,
            system.sigma,
        )
        self.assertAlmostEqual(report.lower, 3 * 2.0)
        self.assertAlmostEqual(report.upper, 3 * 2.0)

    def test_chain_pair(self):
        system = demo_chain()
        atoms = atoms_for(system)
        S = SensorSet.of([3, 5], 5)
        report = theorem1_bounds(
            noise_prior_summary(system), atoms.maps, S, Target.X0, system.sigma
        )
        actual = mmse_report(system, atoms, S).mmse_x0
        self.assertLessEqual(report.lower, actual)
        self.assertLessEqual(actual, report.upper)
        self.assertEqual(report.upper, 5.0)

    def test_mu_equal_one(self):
        system = build_system(np.eye(2), 3)
        with self.assertRaises(MuEqualsOne):
            theorem1_bounds(
                noise_prior_summary(system),
                atoms_for(system).maps,
                SensorSet(()),
                Target.X0,
                system.sigma,
            )

    def test_xk_is_vacuous_for_positive_horizon(self):
        system = build_system(np.eye(2) * 0.5, 3)
        report = theorem1_bounds(
            noise_prior_summary(system),
            atoms_for(system).maps,
            SensorSet.of([1], 2),
            Target.XK,
            system.sigma,
        )
        self.assertTrue(report.vacuous)
        self.assertEqual(report.lower, 0.0)
        self.assertGreater(report.upper, 0.0)

    def test_xk_at_zero_horizon(self):
        system = scalar_system()
        atoms = atoms_for(system)
        S = SensorSet.of([1], 1)
        report = theorem1_bounds(
            noise_prior_summary(system), atoms.maps, S, Target.XK, system.sigma
        )
        self.assertFalse(report.vacuous)
        self.assertAlmostEqual(report.l_i, 1.0)
        self.assertAlmostEqual(report.u_i, 1.0)
        actual = mmse_report(system, atoms, S).mmse_xk
        self.assertLessEqual(report.lower, actual + 1e-12)
        self.assertLessEqual(actual, report.upper + 1e-12)

    def test_sandwich(self):
        for system in random_systems(50, seed=50, n_range=(1, 4), k_range=(0, 3)):
            atoms = atoms_for(system)
            summary = noise_prior_summary(system)
            self.assertLess(summary.mu, 1.0)
            objective = LogdetObjective(system, atoms)
            for r in range(system.n + 1):
                for subset in itertools.combinations(range(1, system.n + 1), r):
                    S = SensorSet.of(subset, system.n)
                    report = theorem1_bounds(
                        summary, atoms.maps, S, Target.X0, system.sigma
                    )
                    actual = mmse_report(system, atoms, S, objective).mmse_x0
                    self.assertGreaterEqual(report.lower, 0.0)
                    self.assertLessEqual(report.lower, actual + 1e-9)
                    self.assertLessEqual(actual, report.upper + 1e-9)

    def test_lower_bound_decreases(self):
        system = build_system(np.eye(3) * 0.5, 2)
        summary = noise_prior_summary(system)
        maps = atoms_for(system).maps
        lowers = [
            theorem1_bounds(
                summary, maps, SensorSet.full(r), Target.X0, system.sigma
            ).lower
            for r in range(4)
        ]
        self.assertEqual(lowers, sorted(lowers, reverse=True))
        longer = build_system(np.eye(3) * 0.5, 4)
        self.assertLess(
            theorem1_bounds(
                summary, atoms_for(longer).maps, SensorSet.full(2), Target.X0, 1.0
            ).lower,
            lowers[2],
        )


class TestCorollaries(unittest.TestCase):
    def test_prior_level_needs_no_sensors(self):
        value = corollary1_min_sensors(HALF, alpha=1.0, k=0, n=1, sigma=1.0, l_i=1.0)
        self.assertLessEqual(value, 1e-12)

    def test_scalar_sensor_count(self):
        value = corollary1_min_sensors(HALF, alpha=0.5, k=0, n=1, sigma=1.0, l_i=1.0)
        self.assertAlmostEqual(value, 1.0)

    def test_linear_in_n(self):
        summary = NoisePriorSummary(
            sigma0_sq=1.0, sigma0_inv_sq=0.0, sigmaw_sq=1.0, mu=0.5
        )
        one = corollary1_min_sensors(summary, 0.1, 3, 2, 1.0, 1.0)
        two = corollary1_min_sensors(summary, 0.1, 3, 4, 1.0, 1.0)
        self.assertAlmostEqual(two, 2 * one)

    def test_sensor_count_grows_as_alpha_shrinks(self):
        values = [
            corollary1_min_sensors(HALF, alpha, 2, 3, 1.0, 1.0)
            for alpha in (2.0, 1.0, 0.5, 0.1)
        ]
        self.assertEqual(values, sorted(values))

    def test_interval_at_prior_level(self):
        value = corollary2_min_interval(
            HALF, alpha=1.0, n=1, sigma=1.0, cardS=1, l_i=1.0
        )
        self.assertAlmostEqual(value, -1.0)

    def test_scalar_interval(self):
        value = corollary2_min_interval(
            HALF, alpha=0.5, n=1, sigma=1.0, cardS=1, l_i=1.0
        )
        self.assertAlmostEqual(value, 0.0, places=12)

    def test_unreachable_alpha(self):
        with self.assertRaises(InfeasibleAlpha):
            corollary2_min_interval(HALF, alpha=0.1, n=1, sigma=1.0, cardS=1, l_i=1.0)

    def test_excluded_mu(self):
        one = HALF.model_copy(update={"mu": 1.0})
        zero = HALF.model_copy(update={"mu": 0.0})
        with self.assertRaises(MuEqualsOne):
            corollary1_min_sensors(one, 0.5, 0, 1, 1.0, 1.0)
        with self.assertRaises(MuEqualsOne):
            corollary2_min_interval(one, 0.5, 1, 1.0, 1, 1.0)
        with self.assertRaises(MuEqualsZero):
            corollary2_min_interval(zero, 0.5, 1, 1.0, 1, 1.0)

    def test_necessary_conditions(self):
        rng = np.random.default_rng(21)
        checked = 0
        for system in random_systems(20, seed=21, n_range=(2, 4), k_range=(0, 3)):
            atoms = atoms_for(system)
            summary = noise_prior_summary(system)
            sensors = [i for i in range(1, system.n + 1) if rng.random() < 0.6] or [1]
            S = SensorSet.of(sensors, system.n)
            alpha = mmse_report(system, atoms, S).mmse_x0
            cor1 = corollary1_min_sensors(
                summary, alpha, system.k, system.n, system.sigma, 1.0
            )
            self.assertLessEqual(cor1, len(S) + 1e-9)
            if system.k == 0:
                # no dynamics on the horizon, so the interval bound is undefined
                self.assertEqual(summary.mu, 0.0)
                continue
            cor2 = corollary2_min_interval(
                summary, alpha, system.n, system.sigma, len(S), 1.0
            )
            self.assertLessEqual(cor2, system.k + 1e-9)
            checked += 1
        self.assertGreater(checked, 0)


class TestEmptySetBound(unittest.TestCase):
    def test_bounds_prior_logdet(self):
        for system in random_systems(20, seed=9):
            atoms = atoms_for(system)
            bound = empty_set_logdet_bound(
                noise_prior_summary(system), system.n, system.k
            )
            value = LogdetObjective(system, atoms).value(SensorSet(()))
            self.assertLessEqual(value, bound + 1e-9)

    def test_identity_prior(self):
        system = demo_chain()
        self.assertEqual(
            empty_set_logdet_bound(noise_prior_summary(system), 5, 5), 0.0
        )
        self.assertAlmostEqual(
            empty_set_logdet_bound(
                NoisePriorSummary(
                    sigma0_sq=math.e, sigma0_inv_sq=1.0, sigmaw_sq=0.0, mu=0.5
                ),
                3,
                4,
                reduced=True,
            ),
            3.0,
        )
