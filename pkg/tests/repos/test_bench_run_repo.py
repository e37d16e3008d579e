import os
import unittest
from unittest.mock import MagicMock, patch

from sqlalchemy import create_engine
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import sessionmaker

os.environ['SQLALCHEMY_CONNECTION_STRING'] = 'sqlite:///:memory:'

from batched_fmaps.models.base import Base
from batched_fmaps.models.bench_run import BenchResult, BenchRun
from batched_fmaps.repos.bench_run_repo import BenchRunRepository


class TestBenchRunRepository(unittest.TestCase):

    def setUp(self):
        self.repo = BenchRunRepository()
        self.engine = create_engine('sqlite:///:memory:')
        Base.metadata.create_all(self.engine)
        self.db = sessionmaker(bind=self.engine)()
        self.addCleanup(self.engine.dispose)
        self.addCleanup(self.db.close)

    def _create(self, run_id: str = 'run-1'):
        return self.repo.create_run({
            'id': run_id, 'command': 'bench', 'status': 'in_progress', 'started_at': '2026-01-01T00:00:00',
            'config': {'k_start': 20}, 'unknown_column': 'ignored',
        }, self.db)

    def test_create_run(self):
        """Test a run is stored and unknown keys are dropped."""
        created = self._create()
        self.assertIsNotNone(created)

        fetched = self.db.get(BenchRun, 'run-1')
        self.assertEqual(fetched.command, 'bench')
        self.assertEqual(fetched.config, {'k_start': 20})

    def test_create_run_without_id(self):
        """Test run creation without an ID."""
        with patch('batched_fmaps.repos.bench_run_repo.logging') as mock_logging:
            result = self.repo.create_run({'command': 'bench'}, self.db)

        self.assertIsNone(result)
        mock_logging.error.assert_called_once()

    def test_add_results(self):
        """Test result rows are attached to their run."""
        self._create()
        stored = self.repo.add_results('run-1', [
            {'k': 30, 'solver': 'rowwise', 'median_ms': 1.5},
            {'k': 20, 'solver': 'rowwise', 'median_ms': 1.0},
            {'k': 20, 'solver': 'batched', 'median_ms': 0.2, 'flagged': True, 'speedup': 5.0},
        ], self.db)

        self.assertEqual(stored, 3)
        results = (self.db.query(BenchResult)
                   .filter(BenchResult.run_id == 'run-1')
                   .order_by(BenchResult.k, BenchResult.solver)
                   .all())
        self.assertEqual([(r.k, r.solver) for r in results], [(20, 'batched'), (20, 'rowwise'), (30, 'rowwise')])
        self.assertTrue(results[0].flagged)

    def test_update_run(self):
        self._create()
        self.assertTrue(self.repo.update_run('run-1', {'status': 'completed'}, self.db))
        self.assertEqual(self.db.get(BenchRun, 'run-1').status, 'completed')

    def test_update_missing_run(self):
        self.assertFalse(self.repo.update_run('missing', {'status': 'failed'}, self.db))

    def test_database_errors_are_swallowed(self):
        """Test SQLAlchemy errors are logged, not raised."""
        mock_db = MagicMock()
        mock_db.get.side_effect = SQLAlchemyError("boom")
        mock_db.flush.side_effect = SQLAlchemyError("boom")

        with patch('batched_fmaps.repos.bench_run_repo.logging') as mock_logging:
            self.assertIsNone(self.repo.create_run({'id': 'run-1', 'command': 'bench'}, mock_db))
            self.assertFalse(self.repo.update_run('run-1', {}, mock_db))
            self.assertEqual(self.repo.add_results('run-1', [{'k': 4, 'solver': 'rowwise'}], mock_db), 0)

        self.assertEqual(mock_logging.error.call_count, 3)


if __name__ == '__main__':
    unittest.main()
