import io
import unittest

from batched_fmaps.exceptions import InvalidParameterError
from batched_fmaps.overlap_metrics import Metric, Predictor
from batched_fmaps.services.metrics_service import SWEEP_COLUMNS, MetricsService


class TestMetricsService(unittest.TestCase):

    def setUp(self):
        self.service = MetricsService()

    def test_predictors(self):
        names = [predictor.name for predictor in self.service.predictors()]
        self.assertEqual(names, ['Zeros', 'Ones', 'Random'])
        self.assertEqual(self.service.predictors(0.25)[2].name, 'Random(0.25)')

    def test_sweep_size(self):
        rows = self.service.sweep(1000, 101)
        self.assertEqual(len(rows), 2121)

    def test_write_sweep(self):
        rows = self.service.sweep(1000, 3)
        stream = io.StringIO()
        written = self.service.write_sweep(rows, stream)

        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], ','.join(SWEEP_COLUMNS))
        self.assertEqual(written, len(rows))
        self.assertEqual(len(lines), len(rows) + 1)
        self.assertIn('0,Zeros,Sensitivity,0,1', lines)
        self.assertIn('0.5,Ones,IoU,0.5,0', lines)

    def test_balanced_accuracy_column_is_half(self):
        """Test every degenerate predictor scores 0.5 inside (0, 1) and is flagged at both ends."""
        interior = 0
        for row in self.service.sweep(1000, 11):
            if row.metric is not Metric.BALANCED_ACCURACY:
                continue
            if row.ratio in (0.0, 1.0):
                self.assertTrue(row.degenerate, f"{row.predictor} at r={row.ratio}")
            else:
                interior += 1
                self.assertFalse(row.degenerate)
                self.assertAlmostEqual(row.value, 0.5, delta=1e-12)
        self.assertEqual(interior, 3 * 9)

    def test_monte_carlo_check_random(self):
        check = self.service.monte_carlo_check(Predictor.random(), 0.3, 10000, seed=0, trials=100)
        self.assertLess(check.max_relative_error, 0.02)

    def test_monte_carlo_check_zeros_exact(self):
        check = self.service.monte_carlo_check(Predictor.zeros(), 0.4, 500, seed=1, trials=2)
        self.assertEqual(check.max_relative_error, 0.0)
        self.assertEqual(check.empirical, check.expected)

    def test_monte_carlo_check_validation(self):
        with self.assertRaises(InvalidParameterError):
            self.service.monte_carlo_check(Predictor.random(), 0.3, 0)


if __name__ == '__main__':
    unittest.main()
