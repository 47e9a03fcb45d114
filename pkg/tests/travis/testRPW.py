import json
import math
import unittest
import numpy as np

from rpwmetric.classes.MetricSpec import MetricSpec
from rpwmetric.classes.RPWResult import RPWResult
from rpwmetric.modules import exact_ot
from rpwmetric.modules import rpw as rp
from rpwmetric.modules.distributions import cost_matrix, from_points, normalize, support_diameter
from rpwmetric.util import testutils as tu


def _normalized(mu, nu, diameter=None):
    return normalize(cost_matrix(mu, nu), diameter)


class TestRPW(unittest.TestCase):
    def testIdentity(self):
        mu, _, _ = tu.two_by_two()
        cm = _normalized(mu, mu)
        for p in (1.0, 2.0, 3.0, math.inf):
            for k in (0.1, 1.0, 10.0):
                self.assertEqual(rp.rpw(mu, mu, cm, p, k).epsilon, 0.0)

    def testTwoByTwo(self):
        mu, nu, cm = tu.two_by_two()
        result = rp.rpw(mu, nu, cm, p=1, k=1)
        self.assertAlmostEqual(result.epsilon, 0.05, places=12)
        self.assertEqual(result.method, 'profile_intersection')
        self.assertAlmostEqual(result.x_star, 0.95, places=12)
        self.assertAlmostEqual(result.y_star, 0.05, places=12)

    def testOutlier(self):
        mu, nu, cm = tu.point_with_outlier()
        expected = (-1 + math.sqrt(1.04)) / 2
        self.assertAlmostEqual(rp.rpw(mu, nu, cm, p=2, k=1).epsilon, expected, places=9)
        self.assertAlmostEqual(expected, 0.009902, delta=1e-6)
        self.assertAlmostEqual(rp.wasserstein(mu, nu, cm, p=2), 0.1, places=9)

    def testGeneralP(self):
        # the crossing solves eps ** 3 + eps = 0.01 on the outlier instance
        mu, nu, cm = tu.point_with_outlier()
        eps = rp.rpw(mu, nu, cm, p=3, k=1).epsilon
        half, root = 0.005, math.sqrt(0.005 ** 2 + 1 / 27)
        expected = float(np.cbrt(half + root) + np.cbrt(half - root))
        self.assertAlmostEqual(expected, 0.00999900029988, delta=1e-14)
        self.assertAlmostEqual(eps, expected, delta=1e-11)
        self.assertLessEqual(abs((0.01 - eps) - eps ** 3), 1e-11)

    def testAgainstLinprogGrid(self):
        rng = np.random.default_rng(21)
        for _ in range(3):
            mu, nu = tu.random_instance(rng, max_atoms=3, max_d=2)
            cm = _normalized(mu, nu)
            exact = rp.rpw(mu, nu, cm, p=1, k=1).epsilon
            grid = tu.brute_force_rpw(mu, nu, cm, 1.0, 1.0, steps=200)
            self.assertTrue(grid - 1 / 200.0 - 1e-9 <= exact <= grid + 1e-9)

    def testKZeroIsTV(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            mu, nu = tu.random_instance(rng, max_atoms=6, max_d=2, grid=3)
            cm = _normalized(mu, nu)
            for p in (1.0, 2.0):
                result = rp.rpw(mu, nu, cm, p, 0.0)
                self.assertAlmostEqual(result.epsilon, rp.tv(mu, nu), delta=1e-9)
                self.assertEqual(result.method, 'total_variation')

    def testMetricAxioms(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            d = int(rng.integers(1, 3))
            triple = [tu.random_distribution(rng, int(rng.integers(1, 7)), d) for _ in range(3)]
            diameter = support_diameter(*triple)
            for p in (1.0, 2.0):
                for k in (0.1, 1.0, 10.0):
                    def dist(a, b):
                        return rp.rpw(a, b, _normalized(a, b, diameter), p, k).epsilon
                    ab, ba = dist(triple[0], triple[1]), dist(triple[1], triple[0])
                    bc, ac = dist(triple[1], triple[2]), dist(triple[0], triple[2])
                    self.assertAlmostEqual(ab, ba, delta=1e-9)
                    self.assertGreater(ab, 0)
                    self.assertLessEqual(ac, ab + bc + 1e-7)

    def testLargeKBand(self):
        # W_p - k^(-1/p) <= k * rpw <= W_p
        rng = np.random.default_rng(13)
        for _ in range(15):
            mu, nu = tu.random_instance(rng, max_atoms=5, max_d=2)
            cm = _normalized(mu, nu)
            for p in (1.0, 2.0):
                wp = rp.wasserstein(mu, nu, cm, p)
                for k in (0.5, 1.0, 2.0, 10.0):
                    value = rp.rpw(mu, nu, cm, p, k).epsilon
                    self.assertLessEqual(k * value, wp + 1e-9)
                    self.assertGreaterEqual(value + k ** (-(p + 1) / p), wp / k - 1e-9)

    def testUnnormalizedRejected(self):
        mu, nu, _ = tu.two_by_two()
        with self.assertRaises(ValueError):
            rp.rpw(mu, nu, cost_matrix(mu, from_points([[0], [3]], [1, 1])), 1, 1)
        with self.assertRaises(ValueError):
            rp.rpw(mu, nu, _normalized(mu, nu), 1, -1)

    def testDegenerate(self):
        mu = from_points([[1, 1]], [1])
        result = rp.rpw(mu, mu, _normalized(mu, mu), 2, 1)
        self.assertEqual(result.epsilon, 0.0)
        self.assertEqual(result.method, 'total_variation')


class TestRPWVariants(unittest.TestCase):
    def testBinaryIdentity(self):
        mu, _, _ = tu.two_by_two()
        result = rp.rpw_binary_search(mu, mu, _normalized(mu, mu), 2, 1, delta=2 ** -10)
        self.assertLessEqual(result.epsilon, 2 ** -10)
        self.assertEqual(result.method, 'binary_search')

    def testBinaryTwoByTwo(self):
        mu, nu, cm = tu.two_by_two()
        result = rp.rpw_binary_search(mu, nu, cm, 1, 1, delta=1e-4)
        self.assertAlmostEqual(result.epsilon, 0.05, delta=1e-4)

    def testBinaryInfiniteP(self):
        mu, nu, cm = tu.point_with_outlier()
        result = rp.rpw_binary_search(mu, nu, cm, math.inf, 1, delta=1e-4)
        self.assertAlmostEqual(result.epsilon, 0.01, delta=1e-4)

    def testApproxIdentity(self):
        mu, _, _ = tu.two_by_two()
        self.assertEqual(rp.rpw_approx(mu, mu, _normalized(mu, mu), 2, 1, delta=0.1).epsilon, 0.0)

    def testApproxTwoByTwo(self):
        mu, nu, cm = tu.two_by_two()
        result = rp.rpw_approx(mu, nu, cm, 1, 1, delta=0.01)
        self.assertGreaterEqual(result.epsilon, 0.05 - 1e-12)
        self.assertLessEqual(result.epsilon, 0.06)
        self.assertEqual(result.method, 'approx_profile')

    def testApproxSandwich(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            mu, nu = tu.random_instance(rng, max_atoms=6, max_d=2)
            cm = _normalized(mu, nu)
            for p in (1.0, 2.0):
                exact = rp.rpw(mu, nu, cm, p, 1.0).epsilon
                for delta in (1e-2, 1e-3):
                    approx = rp.rpw_approx(mu, nu, cm, p, 1.0, delta).epsilon
                    self.assertGreaterEqual(approx, exact - 1e-9)
                    self.assertLessEqual(approx, exact + delta + 1e-9)
                    binary = rp.rpw_binary_search(mu, nu, cm, p, 1.0, delta).epsilon
                    self.assertAlmostEqual(binary, exact, delta=delta + 1e-9)

    def testApproxRejects(self):
        mu, nu, cm = tu.two_by_two()
        with self.assertRaises(ValueError):
            rp.rpw_approx(mu, nu, cm, math.inf, 1)
        with self.assertRaises(ValueError):
            rp.rpw_approx(mu, nu, cm, 2, 0)
        with self.assertRaises(ValueError):
            rp.rpw_binary_search(mu, nu, cm, 2, 1, delta=0.7)

    def testPointBounds(self):
        lower, upper = rp.profile_point_bounds(0.2, 0.05, 0.5)
        self.assertAlmostEqual(lower, 0.1)
        self.assertAlmostEqual(upper, 0.2)

    def testProfilePointsBracket(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            mu, nu = tu.random_instance(rng, max_atoms=6, max_d=2)
            cm = _normalized(mu, nu)
            for p in (1.0, 2.0):
                profile = exact_ot.ot_profile(mu, nu, cm, p)
                for k in (0.5, 1.0, 2.0):
                    eps = rp.rpw(mu, nu, cm, p, k).epsilon
                    for mass, cost in profile.breakpoints:
                        lower, upper = rp.profile_point_bounds(1.0 - mass, max(cost, 0.0) ** (1 / p), k)
                        self.assertGreaterEqual(eps, lower - 1e-9)
                        self.assertLessEqual(eps, upper + 1e-9)


class TestRelatedDistances(unittest.TestCase):
    def testTV(self):
        mu, nu, _ = tu.two_by_two()
        self.assertAlmostEqual(rp.tv(mu, nu), 0.1, places=12)
        self.assertEqual(rp.tv(mu, mu), 0.0)
        self.assertEqual(rp.tv(mu, from_points([[7.0]], [1])), 1.0)

    def testLevyProkhorov(self):
        mu, nu, cm = tu.two_by_two()
        self.assertAlmostEqual(rp.levy_prokhorov(mu, nu, cm), 0.1, places=9)
        mu2, nu2, cm2 = tu.point_with_outlier()
        self.assertAlmostEqual(rp.levy_prokhorov(mu2, nu2, cm2), 0.01, places=9)
        self.assertEqual(rp.levy_prokhorov(mu, mu, _normalized(mu, mu)), 0.0)

    def testLevyProkhorovScanAgrees(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            mu, nu = tu.random_instance(rng, max_atoms=10, max_d=2, grid=5)
            cm = _normalized(mu, nu)
            self.assertAlmostEqual(rp.rpw(mu, nu, cm, math.inf, 1.0).epsilon,
                                   rp.levy_prokhorov_scan(mu, nu, cm), delta=1e-7)

    def testWasserstein(self):
        mu, nu, cm = tu.point_with_outlier()
        self.assertAlmostEqual(rp.wasserstein(mu, nu, cm, 3), 0.01 ** (1 / 3), places=9)
        self.assertAlmostEqual(rp.wasserstein(mu, nu, cm, 3), 0.2154, places=4)
        self.assertEqual(rp.wasserstein(mu, nu, cm, math.inf), 1.0)

    def testEvaluate(self):
        mu, nu, cm = tu.two_by_two()
        self.assertAlmostEqual(rp.evaluate(MetricSpec.parse('TV'), mu, nu, cm), 0.1)
        self.assertAlmostEqual(rp.evaluate(MetricSpec.parse('W1'), mu, nu, cm), 0.1)
        self.assertAlmostEqual(rp.evaluate(MetricSpec.parse('LP'), mu, nu, cm), 0.1)
        self.assertAlmostEqual(rp.evaluate(MetricSpec.parse('RPW(1,1)'), mu, nu, cm), 0.05)
        self.assertAlmostEqual(rp.evaluate(MetricSpec.parse('RPW(1,0)'), mu, nu, cm), 0.1)
        approx = rp.evaluate(MetricSpec.parse('RPW(1,1)', method='approx', delta=0.01), mu, nu, cm)
        self.assertTrue(0.05 - 1e-12 <= approx <= 0.06)

    def testDistanceMatrix(self):
        mu, nu, _ = tu.two_by_two()
        spec = MetricSpec.parse('RPW(1,1)')
        serial = rp.distance_matrix([mu, nu], [mu, nu], spec)
        self.assertEqual(serial.shape, (2, 2))
        self.assertAlmostEqual(serial[0, 1], 0.05)
        self.assertAlmostEqual(serial[1, 0], 0.05)
        self.assertEqual(serial[0, 0], 0.0)
        parallel = rp.distance_matrix([mu, nu], [mu, nu], spec, jobs=2)
        self.assertTrue(np.array_equal(serial, parallel))
        with self.assertRaises(ValueError):
            rp.distance_matrix([mu], [nu], spec, jobs=0)


class TestRPWResult(unittest.TestCase):
    def testJson(self):
        result = RPWResult(0.25, math.inf, 2.0, 'binary_search', n_mu=3, n_nu=4, wall_time_ms=1.5)
        record = json.loads(result.to_json())
        self.assertEqual(record['p'], 'inf')
        self.assertAlmostEqual(record['x_star'], 0.75)
        self.assertAlmostEqual(record['y_star'], 0.5)
        self.assertEqual(record['n_nu'], 4)

    def testClippedAndChecked(self):
        self.assertEqual(RPWResult(1.0 + 1e-15, 2, 1, 'approx_profile').epsilon, 1.0)
        with self.assertRaises(ValueError):
            RPWResult(0.1, 2, 1, 'guess')


if __name__ == '__main__':
    unittest.main()
