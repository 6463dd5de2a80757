import unittest
import xml.etree.ElementTree as ET

import numpy as np

from fifaug import datasets, svgplot
from fifaug.errors import DatasetError
from fifaug.fif import generate_linear
from fifaug.series import TimeSeries

from .helpers import temp_path, with_clean_file

SVG = '{http://www.w3.org/2000/svg}'


class TestGenerate(unittest.TestCase):
    def test_gamma(self):
        self.assertEqual(datasets.generate('gamma').points(), [(float(x), float(y)) for x, y in datasets.GAMMA])

    def test_same_seed_same_series(self):
        self.assertEqual(datasets.generate('noise', 100, seed=7), datasets.generate('noise', 100, seed=7))
        self.assertNotEqual(datasets.generate('noise', 100, seed=7), datasets.generate('noise', 100, seed=8))

    def test_diurnal_cycle(self):
        values = datasets.generate('diurnal', 168, seed=0).y
        centered = values - values.mean()

        def autocorrelation(lag):
            return float(np.dot(centered[:-lag], centered[lag:]) / np.dot(centered, centered))

        self.assertGreater(autocorrelation(24), 0.5)
        self.assertGreater(autocorrelation(24), autocorrelation(12))

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            datasets.generate('sunspots')
        with self.assertRaises(ValueError):
            datasets.generate('noise', 3)


class TestCsv(unittest.TestCase):
    def test_values_round_trip_to_two_decimals(self):
        series = datasets.generate('diurnal', 30, seed=1)
        filename = temp_path('fifaug-test-values.csv')
        with with_clean_file(filename):
            datasets.write_csv(filename, series)
            dataset = datasets.read_csv(filename)

        np.testing.assert_array_equal(dataset.series.x, np.arange(30.0))
        np.testing.assert_allclose(dataset.series.y, series.y, atol=0.005)
        self.assertIsNone(dataset.timestamps)

    def test_abscissae_are_kept(self):
        series = generate_linear(datasets.generate('gamma'), 3).points
        filename = temp_path('fifaug-test-x.csv')
        with with_clean_file(filename):
            datasets.write_csv(filename, series)
            with open(filename) as f:
                self.assertEqual(f.readline().strip(), 'x,value')
            dataset = datasets.read_csv(filename)
        np.testing.assert_array_equal(dataset.series.x, series.x)

    def test_timestamps(self):
        filename = temp_path('fifaug-test-timestamps.csv')
        with with_clean_file(filename):
            with open(filename, 'w') as f:
                f.write('timestamp,value\n2024-01-01T00:00,1.5\n2024-01-01T01:00,2.5\n2024-01-01T02:00,0.5\n')
            dataset = datasets.read_csv(filename)

            self.assertEqual(dataset.timestamps[1], '2024-01-01T01:00')
            np.testing.assert_array_equal(dataset.series.y, [1.5, 2.5, 0.5])

            datasets.write_csv(filename, dataset.series, timestamps=dataset.timestamps)
            self.assertEqual(datasets.read_csv(filename).timestamps, dataset.timestamps)

    def test_timestamps_out_of_order(self):
        filename = temp_path('fifaug-test-disorder.csv')
        with with_clean_file(filename):
            with open(filename, 'w') as f:
                f.write('timestamp,value\n2024-01-01T01:00,1.5\n2024-01-01T00:00,2.5\n')
            with self.assertRaises(DatasetError):
                datasets.read_csv(filename)

    def test_malformed_files(self):
        filename = temp_path('fifaug-test-malformed.csv')
        for content in ('temperature\n1.0\n', 'value\n', 'value\n1.0\nhot\n', 'x,value\n2,1.0\n1,2.0\n'):
            with with_clean_file(filename):
                with open(filename, 'w') as f:
                    f.write(content)
                with self.assertRaises(DatasetError):
                    datasets.read_csv(filename)

    def test_missing_file(self):
        path = temp_path('fifaug-no-such-file.csv')
        with self.assertRaises(DatasetError) as cm:
            datasets.read_csv(path)
        self.assertIn(path, str(cm.exception))
        self.assertIsInstance(cm.exception, OSError)

    def test_digest_is_stable(self):
        filename = temp_path('fifaug-test-digest.csv')
        with with_clean_file(filename):
            datasets.write_csv(filename, datasets.generate('gamma'))
            first = datasets.file_digest(filename)
            self.assertEqual(first, datasets.file_digest(filename))
            self.assertTrue(first.startswith('sha256:'))


class TestSvg(unittest.TestCase):
    def test_curves_and_markers(self):
        gamma = datasets.generate('gamma')
        curves = [svgplot.Curve(name, generate_linear(gamma, n).points) for name, n in
                  (('a', 1), ('b', 3), ('c', 5), ('d', 7))]
        root = ET.fromstring(svgplot.render_svg(curves, svgplot.Curve('nodes', gamma), title='Gamma'))

        self.assertEqual(root.get('width'), '800')
        self.assertEqual(len(root.findall(f'{SVG}polyline')), 4)
        markers = root.findall(f"{SVG}g[@class='markers']")
        self.assertEqual(len(markers), 1)
        self.assertEqual(len(markers[0].findall(f'{SVG}circle')), 11)

    def test_flat_curve(self):
        root = ET.fromstring(svgplot.render_svg([svgplot.Curve('flat', TimeSeries.from_values([2.0] * 5))]))
        self.assertEqual(len(root.findall(f'{SVG}polyline')), 1)

    def test_nothing_to_plot(self):
        with self.assertRaises(ValueError):
            svgplot.render_svg([])


if __name__ == '__main__':
    unittest.main()
