import json
import os
import shutil
import tempfile
import unittest
import numpy as np
import pandas as pd

from rpwmetric.classes.ConvergenceReport import ConvergenceReport
from rpwmetric.modules.distributions import cost_matrix, from_image, normalize
from rpwmetric.modules.exact_ot import ot_profile
from rpwmetric.util import dist_io, experiment_io
from rpwmetric.util.testutils import testfile


class TestReadDistribution(unittest.TestCase):
    def testTwoByTwo(self):
        mu = dist_io.read_distribution(testfile('two_by_two_mu.csv'))
        self.assertEqual(len(mu), 2)
        self.assertEqual(mu.dim, 1)
        self.assertTrue(np.allclose(mu.masses, [0.5, 0.5]))

    def testRescales(self):
        mu = dist_io.read_distribution(testfile('square_mu.csv'))
        self.assertEqual(mu.dim, 2)
        self.assertTrue(np.allclose(mu.masses, 0.25))

    def testMissingFile(self):
        with self.assertRaises(FileNotFoundError):
            dist_io.read_distribution(testfile('no_such_file.csv'))
        with self.assertRaises(IOError):
            dist_io.read_distribution('')

    def testMalformed(self):
        with self.assertRaises(IOError):
            dist_io.read_distribution(testfile('bad_mass.csv'))
        with self.assertRaises(IOError):
            dist_io.read_distribution(testfile('bad_columns.csv'))


class TestImages(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def testCsvImage(self):
        pixels = dist_io.read_image(testfile('small_image.csv'))
        self.assertEqual(pixels.shape, (4, 4))
        mu = from_image(pixels)
        self.assertEqual(len(mu), 2)
        self.assertTrue(np.allclose(mu.masses, [0.75, 0.25]))

    def testPgmRoundTrip(self):
        pixels = np.zeros((5, 7))
        pixels[1, 2] = 200
        pixels[4, 6] = 17
        path = os.path.join(self.tmpdir, 'img.pgm')
        dist_io.write_pgm(pixels, path)
        back = dist_io.read_image(path)
        self.assertEqual(back.shape, (5, 7))
        self.assertTrue(np.array_equal(back, pixels))

    def testUnsupported(self):
        path = os.path.join(self.tmpdir, 'img.xyz')
        with open(path, 'w') as handle:
            handle.write('0 1\n')
        with self.assertRaises(IOError):
            dist_io.read_image(path)

    def testLabels(self):
        labels = dist_io.read_labels(testfile('corpus'))
        self.assertListEqual(list(labels.columns), ['id', 'label', 'path'])
        self.assertEqual(labels.shape[0], 8)
        self.assertTrue(all(os.path.exists(path) for path in labels['path']))
        with self.assertRaises(FileNotFoundError):
            dist_io.read_labels(self.tmpdir)


class TestWriters(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def testDistributionRoundTrip(self):
        mu = dist_io.read_distribution(testfile('square_nu.csv'))
        path = os.path.join(self.tmpdir, 'nu.csv')
        dist_io.write_distribution(mu, path)
        back = dist_io.read_distribution(path)
        self.assertTrue(np.array_equal(back.points, mu.points))
        self.assertTrue(np.allclose(back.masses, mu.masses, atol=1e-15))

    def testProfile(self):
        mu = dist_io.read_distribution(testfile('outlier_mu.csv'))
        nu = dist_io.read_distribution(testfile('outlier_nu.csv'))
        path = os.path.join(self.tmpdir, 'profile.csv')
        dist_io.write_profile(ot_profile(mu, nu, normalize(cost_matrix(mu, nu)), 2), path)
        df = pd.read_csv(path)
        self.assertListEqual(list(df.columns), ['mass', 'p_power_cost', 'wp_value'])
        self.assertTrue(np.allclose(df['mass'], [0, 0.99, 1]))
        self.assertAlmostEqual(df['wp_value'].values[-1], 0.1)

    def testJson(self):
        path = os.path.join(self.tmpdir, 'out.json')
        text = dist_io.write_json({'b': 1, 'a': 0.5}, path)
        self.assertEqual(text, '{"a": 0.5, "b": 1}')
        with open(path) as handle:
            self.assertEqual(json.load(handle), {'a': 0.5, 'b': 1})

    def testFailedWriteLeavesNothing(self):
        path = os.path.join(self.tmpdir, 'never.csv')

        def writer(tmp):
            with open(tmp, 'w') as handle:
                handle.write('partial')
            raise RuntimeError('solver failed')

        with self.assertRaises(RuntimeError):
            dist_io.atomic_write(path, writer)
        self.assertListEqual(os.listdir(self.tmpdir), [])

    def testReportAndPlot(self):
        frame = pd.DataFrame({'metric': ['W2'] * 4 + ['TV'] * 4,
                              'n': [100, 100, 1000, 1000] * 2,
                              'seed': [0, 1] * 4,
                              'value': [0.3, 0.32, 0.17, 0.18, 0.08, 0.06, 0.02, 0.03]})
        report = ConvergenceReport(frame, sampler_kind='two_point')
        out = os.path.join(self.tmpdir, 'report.csv')
        summary = os.path.join(self.tmpdir, 'summary.csv')
        svg = os.path.join(self.tmpdir, 'plot.svg')
        experiment_io.write_report(report, out, summary_file=summary, svg_file=svg)
        self.assertEqual(pd.read_csv(out).shape, (8, 4))
        self.assertListEqual(list(pd.read_csv(summary).columns), ['metric', 'slope', 'stderr'])
        with open(svg) as handle:
            first = handle.read()
        experiment_io.write_report(report, out, svg_file=svg)
        with open(svg) as handle:
            self.assertEqual(first, handle.read())

    def testTableToDirectory(self):
        with self.assertRaises(IOError):
            experiment_io.write_experiment_table(pd.DataFrame({'a': [1]}), self.tmpdir)


if __name__ == '__main__':
    unittest.main()
