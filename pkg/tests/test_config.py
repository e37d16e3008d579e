import os
import unittest
from unittest.mock import patch

# Keep recorded runs away from the working directory
os.environ['SQLALCHEMY_CONNECTION_STRING'] = 'sqlite:///:memory:'

# This needs to be imported after the environment is patched
from batched_fmaps.config import _get_setting


class TestConfig(unittest.TestCase):

    @patch.dict(os.environ, {'TEST_VAR': 'test_value'})
    def test_get_setting_found_in_env(self):
        """Test _get_setting when a variable is present in the environment."""
        self.assertEqual(_get_setting('TEST_VAR'), 'test_value')

    @patch('batched_fmaps.config._local_settings', {'TEST_VAR': 'local_value'})
    def test_get_setting_fallback_to_local_settings(self):
        """Test _get_setting falls back to local settings when env var is missing."""
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(_get_setting('TEST_VAR'), 'local_value')

    @patch('batched_fmaps.config._local_settings', {'TEST_VAR': 'local_value'})
    @patch.dict(os.environ, {'TEST_VAR': 'env_value'})
    def test_get_setting_env_wins_over_local_settings(self):
        """Test environment variables take priority over local.settings.json."""
        self.assertEqual(_get_setting('TEST_VAR'), 'env_value')

    def test_get_setting_missing_required(self):
        """Test _get_setting raises ValueError when a required variable is missing."""
        with patch.dict(os.environ, {}, clear=True):
            with self.assertRaisesRegex(ValueError, "Missing required setting: 'MISSING_VAR'"):
                _get_setting('MISSING_VAR', required=True)

    def test_get_setting_missing_not_required(self):
        """Test _get_setting returns None when a non-required variable is missing."""
        with patch.dict(os.environ, {}, clear=True):
            self.assertIsNone(_get_setting('MISSING_VAR'))

    def test_get_setting_missing_with_default(self):
        """Test _get_setting returns the default value for a missing variable."""
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(_get_setting('MISSING_VAR', default=42), 42)

    def test_numeric_settings_are_converted(self):
        """Test numeric settings are parsed from their string form on reload."""
        import importlib
        import batched_fmaps.config
        with patch.dict(os.environ, {'FMAP_DEFAULT_LAMBDA': '2.5', 'BENCH_REPETITIONS': '7'}):
            importlib.reload(batched_fmaps.config)
            self.assertEqual(batched_fmaps.config.FMAP_DEFAULT_LAMBDA, 2.5)
            self.assertEqual(batched_fmaps.config.BENCH_REPETITIONS, 7)
        importlib.reload(batched_fmaps.config)

    def test_defaults(self):
        """Test the documented defaults when nothing is configured."""
        import importlib
        import batched_fmaps.config
        with patch.dict(os.environ, {}, clear=True):
            importlib.reload(batched_fmaps.config)
        config = batched_fmaps.config
        self.assertEqual(config.FMAP_RESOLVENT_SIGMA, 0.5)
        self.assertEqual(config.BENCH_MEM_CAP_BYTES, 1 << 30)
        self.assertEqual(config.BENCH_WARMUP, 3)
        self.assertEqual(config.LOG_LEVEL, 'WARNING')
        importlib.reload(batched_fmaps.config)


if __name__ == '__main__':
    unittest.main()
