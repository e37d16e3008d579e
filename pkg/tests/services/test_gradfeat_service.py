import unittest
from unittest.mock import patch

import numpy as np

from batched_fmaps.exceptions import InvalidParameterError
from batched_fmaps.services.gradfeat_service import GradFeatCheck, GradFeatConfig, GradFeatService
from batched_fmaps.tangent_features import Variant


class TestGradFeatService(unittest.TestCase):

    def setUp(self):
        self.service = GradFeatService()
        self.config = GradFeatConfig(channels=4, vertices=16, trials=20)

    def test_all_checks_pass(self):
        checks, passed = self.service.run_checks(self.config)
        self.assertTrue(passed, [check for check in checks if not check.passed])
        self.assertEqual(len(checks), 10)
        self.assertEqual(len({check.check for check in checks}), 10)

    def test_default_config_passes(self):
        _, passed = self.service.run_checks(GradFeatConfig())
        self.assertTrue(passed)

    def test_runs_are_seeded(self):
        first, _ = self.service.run_checks(self.config)
        second, _ = self.service.run_checks(self.config)
        self.assertEqual(first, second)

    def test_zero_angle_is_exact(self):
        checks, _ = self.service.run_checks(self.config)
        identity = next(check for check in checks if check.check == 'zero_angle_identity')
        self.assertEqual(identity.statistic, 0.0)

    def test_sensitivity_reports_fraction(self):
        checks, _ = self.service.run_checks(self.config)
        sensitivity = next(check for check in checks if check.check == 'variant_B_frame_sensitivity')
        self.assertGreaterEqual(sensitivity.statistic, 0.99)
        self.assertLessEqual(sensitivity.statistic, 1.0)

    def test_block_form_check(self):
        rng = np.random.default_rng(0)
        draws = self.service._draws(self.config, rng)
        check = self.service.block_form(Variant.B, draws)
        self.assertEqual(check.check, 'block_form_B')
        self.assertTrue(check.passed)

    def test_failed_check_fails_run(self):
        failing = GradFeatCheck('block_B_is_scaled_45_rotation', 1.0, 1e-12, False)
        with patch.object(GradFeatService, 'block_b_rotation', return_value=failing):
            with patch('batched_fmaps.services.gradfeat_service.logging') as mock_logging:
                _, passed = self.service.run_checks(self.config)

        self.assertFalse(passed)
        mock_logging.warning.assert_called_once()

    def test_config_validation(self):
        with self.assertRaises(InvalidParameterError):
            GradFeatConfig(channels=0)
        with self.assertRaises(InvalidParameterError):
            GradFeatConfig(trials=0)
        with self.assertRaises(InvalidParameterError):
            GradFeatConfig(grid_size=1)


if __name__ == '__main__':
    unittest.main()
