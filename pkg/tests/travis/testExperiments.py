import math
import unittest
import numpy as np
import pandas as pd

from rpwmetric.classes.ConvergenceReport import ConvergenceReport, loglog_fit
from rpwmetric.classes.DiscreteDistribution import DiscreteDistribution
from rpwmetric.classes.SyntheticSampler import SyntheticSampler
from rpwmetric.modules import experiments as ex
from rpwmetric.modules.distributions import cost_matrix, from_points, normalize
from rpwmetric.modules.rpw import rpw
from rpwmetric.util import testutils as tu


class TestSyntheticSampler(unittest.TestCase):
    def testTwoPoint(self):
        sampler = SyntheticSampler('two_point', d=3)
        population = sampler.distribution()
        self.assertEqual(len(population), 2)
        self.assertEqual(population.dim, 3)
        self.assertEqual(sampler.diameter, 1.0)

    def testGrid(self):
        sampler = SyntheticSampler('grid4x4')
        population = sampler.distribution()
        self.assertEqual(len(population), 16)
        self.assertAlmostEqual(sampler.diameter, 0.75 * math.sqrt(2))
        with self.assertRaises(ValueError):
            SyntheticSampler('grid4x4', d=3)

    def testUniform(self):
        sampler = SyntheticSampler('uniform_square', seed=1)
        points = sampler.sample_points(50, sampler.rng(50, 0))
        self.assertEqual(points.shape, (50, 2))
        self.assertTrue(np.all((points >= 0) & (points <= 1)))
        with self.assertRaises(ValueError):
            sampler.distribution()

    def testSeedPerTask(self):
        sampler = SyntheticSampler('two_point', seed=4)
        first = sampler.sample_points(20, sampler.rng(20, 3))
        again = sampler.sample_points(20, sampler.rng(20, 3))
        other = sampler.sample_points(20, sampler.rng(20, 4))
        self.assertTrue(np.array_equal(first, again))
        self.assertFalse(np.array_equal(first, other))

    def testUnknown(self):
        with self.assertRaises(ValueError):
            SyntheticSampler('gaussian')


class TestConvergence(unittest.TestCase):
    def testReportShape(self):
        sampler = SyntheticSampler('two_point', seed=0)
        report = ex.convergence_experiment(sampler, [10, 100], ['W2', 'TV', 'RPW(2,1)'], repetitions=3)
        self.assertEqual(report.frame.shape[0], 2 * 3 * 3)
        self.assertListEqual(sorted(report.metrics), ['RPW(2,1)', 'TV', 'W2'])
        self.assertListEqual(report.sizes, [10, 100])
        self.assertTrue(((report.frame['value'] >= 0) & (report.frame['value'] <= 1)).all())
        means = report.means()
        self.assertTrue((means['count'] == 3).all())

    def testDeterministic(self):
        sampler = SyntheticSampler('grid4x4', seed=2)
        first = ex.convergence_experiment(sampler, [10, 40], ['W2', 'RPW(2,1)'], repetitions=2)
        second = ex.convergence_experiment(sampler, [10, 40], ['W2', 'RPW(2,1)'], repetitions=2, jobs=2)
        pd.testing.assert_frame_equal(first.frame, second.frame)

    def testSeedOverride(self):
        sampler = SyntheticSampler('two_point', seed=0)
        first = ex.convergence_experiment(sampler, [20], ['TV'], seed=5, repetitions=2)
        second = ex.convergence_experiment(SyntheticSampler('two_point', seed=5), [20], ['TV'], repetitions=2)
        pd.testing.assert_frame_equal(first.frame, second.frame)

    def testRejects(self):
        sampler = SyntheticSampler('two_point')
        with self.assertRaises(ValueError):
            ex.convergence_experiment(sampler, [100, 10])
        with self.assertRaises(ValueError):
            ex.convergence_experiment(sampler, [10, 10 ** 6])
        with self.assertRaises(ValueError):
            ex.convergence_experiment(SyntheticSampler('uniform_square'), [10, 5000], ['W2'])

    def testSlopes(self):
        frame = pd.DataFrame({'metric': ['A'] * 3 + ['B'] * 3,
                              'n': [100, 1000, 10000] * 2,
                              'seed': [0] * 6,
                              'value': [0.1, 0.01, 0.001, 0.5, 0.5, 0.5]})
        report = ConvergenceReport(frame)
        self.assertAlmostEqual(report.slope('A'), -1.0, places=9)
        self.assertAlmostEqual(report.slope('B'), 0.0, places=9)
        self.assertTrue(report.mean_curve('A').index.tolist() == [100, 1000, 10000])

    def testLogLogFit(self):
        slope, stderr = loglog_fit([10, 100], [1.0, 0.5])
        self.assertAlmostEqual(slope, math.log(0.5) / math.log(10))
        self.assertTrue(np.isnan(stderr))
        with self.assertRaises(ValueError):
            loglog_fit([10], [1.0])


class TestOutlier(unittest.TestCase):
    def testFixture(self):
        mu, nu, _ = tu.point_with_outlier()
        outliers = from_points([[1.0]], [1])
        table = ex.outlier_experiment(mu, mu, outliers, delta_list=[0.01], p=2.0, k=1.0)
        row = table.iloc[0]
        self.assertEqual(row['rpw_clean'], 0.0)
        self.assertAlmostEqual(row['rpw_contaminated'], (-1 + math.sqrt(1.04)) / 2, places=9)
        self.assertAlmostEqual(row['wp_contaminated'], 0.1, places=9)
        self.assertAlmostEqual(row['upper'], 0.01)

    def testRandomOutliers(self):
        rng = np.random.default_rng(6)
        for seed in range(5):
            mu, nu = tu.random_instance(rng, max_atoms=5, max_d=2)
            table = ex.outlier_experiment(mu, nu, delta_list=[0.01, 0.05, 0.2], seed=seed)
            self.assertEqual(table.shape[0], 3)
            self.assertTrue((table['rpw_contaminated'] <= table['upper'] + 1e-7).all())
            self.assertTrue((table['rpw_contaminated'] >= table['lower'] - 1e-7).all())
            self.assertTrue((table['wp_contaminated'] <= table['wp_convexity_bound'] + 1e-7).all())

    def testRejects(self):
        mu, nu, _ = tu.two_by_two()
        with self.assertRaises(ValueError):
            ex.outlier_experiment(mu, nu, delta_list=[1.5])
        with self.assertRaises(ValueError):
            ex.outlier_experiment(mu, nu, from_points([[0, 0]], [1]))


class TestGrid(unittest.TestCase):
    def testExcessIsZeroOnPerfectSample(self):
        # one sample per cell center of a 4 x 4 grid
        centers = (np.arange(4) + 0.5) / 4
        xx, yy = np.meshgrid(centers, centers, indexing='ij')
        samples = np.column_stack([xx.ravel(), yy.ravel()])
        self.assertAlmostEqual(ex.grid_excess(samples, 0.5), 0.0)

    def testExcessAllInOneCell(self):
        samples = np.full((16, 2), 0.1)
        # 4 x 4 grid, all mass in one of 16 cells
        self.assertAlmostEqual(ex.grid_excess(samples, 0.5), 15 / 16)

    def testExcessRejects(self):
        with self.assertRaises(ValueError):
            ex.grid_excess(np.array([[1.5, 0.2]]), 0.25)

    def testTwoGridSides(self):
        for n in (10, 100, 1000, 10000, 100000):
            fine, coarse = ex.two_grid_sides(n)
            self.assertEqual(fine % coarse, 0)
            self.assertGreaterEqual(fine, n ** 0.3 - 1e-9)
            self.assertGreaterEqual(coarse, n ** 0.2 - 1e-9)

    def testTransportBound(self):
        sampler = SyntheticSampler('uniform_square', seed=0)
        samples = sampler.sample_points(500, sampler.rng(500, 0))
        untransported, cost = ex.grid_transport_bound(samples)
        self.assertTrue(0 <= untransported <= 1)
        self.assertTrue(0 <= cost <= math.sqrt(2))
        self.assertAlmostEqual(ex.certificate(untransported, cost), max(untransported, cost / math.sqrt(2)))

    def testCertificateAboveExact(self):
        sampler = SyntheticSampler('uniform_square', seed=3)
        for n in (20, 60):
            samples = sampler.sample_points(n, sampler.rng(n, 0))
            untransported, cost = ex.grid_transport_bound(samples)
            self.assertGreaterEqual(ex.certificate(untransported, cost) + 1e-7, ex.exact_grid_rpw(samples))

    def testExactComparisonUsesFineGrid(self):
        sampler = SyntheticSampler('uniform_square', seed=5)
        samples = sampler.sample_points(80, sampler.rng(80, 0))
        fine, coarse = ex.two_grid_sides(80)
        self.assertGreater(fine, coarse)
        grid_mu = ex.grid_distribution(None, fine)
        self.assertEqual(len(grid_mu), fine ** 2)
        emp = DiscreteDistribution(samples, np.full(80, 1 / 80)).collapse()
        cm = normalize(cost_matrix(grid_mu, emp, 2.0), math.sqrt(2.0))
        expected = rpw(grid_mu, emp, cm, 2.0, 1.0).epsilon
        self.assertAlmostEqual(ex.exact_grid_rpw(samples), expected, delta=1e-12)

    def testExperimentTable(self):
        table = ex.grid_experiment([50, 200], repetitions=2, exact_max_n=50)
        self.assertListEqual(list(table.columns),
                             ['n', 'seed', 'excess', 'untransported', 'cost_bound', 'certificate', 'exact_rpw'])
        self.assertEqual(table.shape[0], 4)
        self.assertTrue(table.loc[table['n'] == 50, 'exact_rpw'].notna().all())
        self.assertTrue(table.loc[table['n'] == 200, 'exact_rpw'].isna().all())
        slopes = ex.grid_slopes(table, min_n=50)
        self.assertIn('excess', slopes)
        self.assertIn('certificate', slopes)


if __name__ == '__main__':
    unittest.main()
