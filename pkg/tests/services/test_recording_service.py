import os
import unittest
from contextlib import contextmanager
from unittest.mock import MagicMock, patch

# Set required env vars for module import
os.environ['SQLALCHEMY_CONNECTION_STRING'] = 'sqlite:///:memory:'

from batched_fmaps.services.recording_service import RecordingService, RunStatus


class TestRecordingService(unittest.TestCase):

    def setUp(self):
        self.mock_repository = MagicMock()
        self.service = RecordingService(repository=self.mock_repository)
        self.mock_db = MagicMock()

        @contextmanager
        def fake_session_manager():
            yield self.mock_db

        patcher = patch('batched_fmaps.services.recording_service.db_session_manager', fake_session_manager)
        patcher.start()
        self.addCleanup(patcher.stop)

    def test_start_run(self):
        """Test starting a recorded run."""
        run_id = self.service.start_run('bench', {'k_start': 20}, {'numpy': '2.0'})

        self.mock_repository.create_run.assert_called_once()
        entity, db = self.mock_repository.create_run.call_args[0]
        self.assertIs(db, self.mock_db)
        self.assertEqual(entity['id'], run_id)
        self.assertEqual(entity['command'], 'bench')
        self.assertEqual(entity['status'], RunStatus.IN_PROGRESS.value)
        self.assertEqual(entity['config'], {'k_start': 20})
        self.assertEqual(len(run_id), 36)

    def test_start_run_storage_failure(self):
        """Test a storage exception yields no run ID."""
        self.mock_repository.create_run.side_effect = Exception("disk full")

        with patch('batched_fmaps.services.recording_service.logging') as mock_logging:
            run_id = self.service.start_run('verify', {}, {})

        self.assertIsNone(run_id)
        mock_logging.error.assert_called_once()
        mock_logging.info.assert_not_called()

    def test_start_run_not_stored(self):
        """Test a repository that stores nothing is reported as a failure, not a started run."""
        self.mock_repository.create_run.return_value = None

        with patch('batched_fmaps.services.recording_service.logging') as mock_logging:
            run_id = self.service.start_run('bench', {}, {})

        self.assertIsNone(run_id)
        mock_logging.error.assert_called_once()
        self.assertIn('stored nothing', mock_logging.error.call_args[0][0])
        mock_logging.info.assert_not_called()

    def test_record_results(self):
        """Test result rows are passed to the repository."""
        self.mock_repository.add_results.return_value = 2
        results = [{'k': 20, 'solver': 'rowwise'}, {'k': 20, 'solver': 'batched'}]

        stored = self.service.record_results('run-1', results)

        self.assertEqual(stored, 2)
        self.mock_repository.add_results.assert_called_once_with('run-1', results, self.mock_db)

    def test_record_results_failure(self):
        """Test a storage failure stores nothing."""
        self.mock_repository.add_results.side_effect = Exception("locked")
        self.assertEqual(self.service.record_results('run-1', [{'k': 4}]), 0)

    def test_complete_run_with_error(self):
        """Test failed runs store their error."""
        self.service.complete_run('run-1', RunStatus.FAILED, 'singular')

        run_id, values, _ = self.mock_repository.update_run.call_args[0]
        self.assertEqual(run_id, 'run-1')
        self.assertEqual(values['status'], 'failed')
        self.assertEqual(values['error'], 'singular')
        self.assertIn('finished_at', values)

    def test_complete_run_without_error(self):
        self.service.complete_run('run-1', RunStatus.COMPLETED)
        values = self.mock_repository.update_run.call_args[0][1]
        self.assertNotIn('error', values)


if __name__ == '__main__':
    unittest.main()
