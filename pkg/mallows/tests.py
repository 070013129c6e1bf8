import itertools
import json

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DimensionMismatch, InvalidConfiguration, UnequalSupportSizes
from mallows.bounds import check_lemma6, check_lemma_bounds, check_theorem3_bound
from mallows.distance import EmpiricalDist, cost_matrix, mallows_distance, optimal_assignment
from simulate.specs import FixedDesignSpec


def brute_force_cost(mu, nu, l):
    costs = cost_matrix(EmpiricalDist(mu), EmpiricalDist(nu), l)
    m = len(mu)
    return min(costs[np.arange(m), list(perm)].sum() for perm in itertools.permutations(range(m)))


class EmpiricalDistTests(SimpleTestCase):
    def test_one_dimensional_atoms_become_columns(self):
        dist = EmpiricalDist([0.0, 1.0, 2.0])
        self.assertEqual((dist.m, dist.k), (3, 1))

    def test_rejects_non_finite_atoms(self):
        with self.assertRaises(InvalidConfiguration):
            EmpiricalDist([[0.0, np.inf]])


class MallowsDistanceTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(17)

    def test_identical_laws(self):
        points = self.rng.standard_normal((10, 3))
        self.assertEqual(mallows_distance(points, points), 0.0)

    def test_two_atom_example(self):
        """Test d2 between {0,1} and {0,2} is sqrt(0.5), not the crossing cost sqrt(2.5)"""
        self.assertAlmostEqual(mallows_distance([0.0, 1.0], [0.0, 2.0], 2), np.sqrt(0.5), places=15)
        self.assertAlmostEqual(mallows_distance([0.0, 1.0], [0.0, 2.0], 2, method='assignment'), np.sqrt(0.5))

    def test_translation(self):
        for _ in range(10):
            mu = EmpiricalDist(self.rng.standard_normal((15, 3)))
            shift = self.rng.standard_normal(3)
            nu = mu.shift(shift)
            np.testing.assert_allclose(nu.mean, mu.mean + shift)
            self.assertAlmostEqual(mallows_distance(mu, nu, 2), float(np.linalg.norm(shift)), places=10)

    def test_sort_shortcut_matches_assignment(self):
        for m in (1, 2, 5, 17, 64):
            mu = self.rng.standard_normal(m)
            nu = self.rng.standard_normal(m) * 2 + 1
            for l in (1, 2, 3):
                sorted_pairs, sorted_cost = optimal_assignment(mu, nu, l, method='sort')
                solver_pairs, solver_cost = optimal_assignment(mu, nu, l, method='assignment')
                if l == 1:
                    # l=1 admits ties between crossing and nested pairings
                    self.assertAlmostEqual(sorted_cost, solver_cost, places=10)
                    continue
                np.testing.assert_array_equal(sorted_pairs, solver_pairs)
                self.assertEqual(sorted_cost, solver_cost)

    def test_assignment_matches_exhaustive_search(self):
        """Test the solver optimum equals the permutation minimum for m <= 7"""
        for m in range(1, 8):
            mu = self.rng.integers(-5, 6, size=(m, 2)).astype(float)
            nu = self.rng.integers(-5, 6, size=(m, 2)).astype(float)
            _, cost = optimal_assignment(mu, nu, 2)
            self.assertAlmostEqual(cost, brute_force_cost(mu, nu, 2), places=10)
            _, cost = optimal_assignment(mu, nu, 1)
            self.assertAlmostEqual(cost, brute_force_cost(mu, nu, 1), places=10)

    def test_metric_axioms(self):
        for _ in range(20):
            a, b, c = (EmpiricalDist(self.rng.standard_normal((8, 2))) for _ in range(3))
            self.assertEqual(mallows_distance(a, b), mallows_distance(b, a))
            self.assertLessEqual(mallows_distance(a, c), mallows_distance(a, b) + mallows_distance(b, c) + 1e-9)

    def test_order_monotonicity(self):
        for _ in range(20):
            mu, nu = self.rng.standard_normal((2, 12, 3))
            self.assertLessEqual(mallows_distance(mu, nu, 1), mallows_distance(mu, nu, 2) + 1e-12)

    def test_unequal_support_sizes(self):
        with self.assertRaises(UnequalSupportSizes):
            mallows_distance(np.zeros((3, 2)), np.zeros((4, 2)))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            mallows_distance(np.zeros((3, 2)), np.zeros((3, 3)))


class Theorem3BoundTests(SimpleTestCase):
    def test_equal_laws_give_zero(self):
        X = np.random.default_rng(0).standard_normal((6, 2))
        F = EmpiricalDist(np.array([[1.0, 0.0], [-1.0, 0.5], [0.0, -0.5]]))
        report = check_theorem3_bound(X, F, F, trials=2, seed=3)
        self.assertEqual(report.estimate, 0.0)
        self.assertTrue(report.passed)

    def test_scalar_mean_example(self):
        """Test n=4, X=ones, F={+-1}, G={+-2}: bound 4*1*(1/4)*1 = 1"""
        report = check_theorem3_bound(np.ones((4, 1)), [-1.0, 1.0], [-2.0, 2.0], trials=8, seed=11)
        self.assertAlmostEqual(report.bound, 1.0)
        self.assertAlmostEqual(report.slack, 0.15)
        self.assertTrue(report.passed)
        self.assertGreater(report.estimate, 0.5)

    def test_random_instances_pass(self):
        rng = np.random.default_rng(23)
        passed = 0
        for trial in range(20):
            X = rng.standard_normal((8, 2))
            F = rng.standard_normal((5, 2))
            G = rng.standard_normal((5, 2)) * 1.5
            report = check_theorem3_bound(X, F - F.mean(axis=0), G - G.mean(axis=0), seed=trial)
            passed += report.passed
        self.assertGreaterEqual(passed, 19)

    def test_json_keys(self):
        report = check_theorem3_bound(np.ones((4, 1)), [-1.0, 1.0], [-2.0, 2.0], trials=1, seed=1)
        payload = json.loads(report.to_json())
        self.assertEqual(set(payload), {'estimate', 'bound', 'slack', 'pass', 'trials', 'seed'})
        self.assertEqual(payload['seed'], 1)


class LemmaBoundTests(SimpleTestCase):
    def test_degenerate_errors(self):
        spec = FixedDesignSpec(n=20, beta=[[1.0, 2.0]], sigma=[[0.0]], seed=1)
        report = check_lemma_bounds(spec, reps=5)
        self.assertTrue(report.passed)
        self.assertLess(report.residual.estimate, 1e-20)
        self.assertEqual(report.residual.bound, 0.0)

    def test_scalar_model(self):
        spec = FixedDesignSpec(n=50, beta=[[0.7]], sigma=[[1.0]], seed=2)
        report = check_lemma_bounds(spec, reps=200)
        self.assertAlmostEqual(report.residual.bound, 1 / 50)
        self.assertAlmostEqual(report.centered.bound, 2 / 50)
        self.assertTrue(report.passed)
        self.assertTrue(report.to_dict()['pass'])

    def test_seed_override_changes_draws(self):
        spec = FixedDesignSpec(n=30, beta=[[0.7]], sigma=[[1.0]], seed=2)
        first = check_lemma_bounds(spec, reps=10)
        second = check_lemma_bounds(spec, reps=10, seed=3)
        self.assertNotEqual(first.residual.estimate, second.residual.estimate)


class Lemma6Tests(SimpleTestCase):
    def test_equal_inputs(self):
        u = np.random.default_rng(1).standard_normal((20, 3))
        report = check_lemma6(u, u)
        self.assertEqual(report.estimate, 0.0)
        self.assertEqual(report.bound, 0.0)
        self.assertTrue(report.passed)

    def test_shift_leaves_covariance_unchanged(self):
        u = np.random.default_rng(2).standard_normal((20, 3))
        report = check_lemma6(u, u + np.array([1.0, -2.0, 0.5]))
        self.assertLess(report.estimate, 1e-20)
        self.assertGreater(report.bound, 0.0)
        self.assertTrue(report.passed)

    def test_random_pairs_pass(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            u, v = rng.standard_normal((2, 20, 3))
            self.assertTrue(check_lemma6(u, v).passed)

    def test_large_common_scale_violates_inequality(self):
        """Test u=(10,-10), v=(11,-11): lhs 441 exceeds rhs 1"""
        report = check_lemma6([10.0, -10.0], [11.0, -11.0])
        self.assertAlmostEqual(report.estimate, 441.0)
        self.assertAlmostEqual(report.bound, 1.0)
        self.assertFalse(report.passed)

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            check_lemma6(np.zeros((3, 2)), np.zeros((4, 2)))
