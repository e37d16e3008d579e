import os
import unittest
from unittest.mock import patch, MagicMock

os.environ['SQLALCHEMY_CONNECTION_STRING'] = 'sqlite:///:memory:'

from sqlalchemy import inspect

import batched_fmaps.database
from batched_fmaps.database import get_engine, get_session_maker


class TestDatabase(unittest.TestCase):

    def setUp(self):
        """Reset the global engine and session maker for each test."""
        batched_fmaps.database._db_engine = None
        batched_fmaps.database._session_maker = None

    def tearDown(self):
        batched_fmaps.database._db_engine = None
        batched_fmaps.database._session_maker = None

    @patch('batched_fmaps.database.Base')
    @patch('batched_fmaps.database.create_engine')
    def test_get_engine_uses_connection_string(self, mock_create_engine, mock_base):
        """Test get_engine passes the configured connection string."""
        mock_engine = MagicMock()
        mock_create_engine.return_value = mock_engine

        with patch('batched_fmaps.database.SQLALCHEMY_CONNECTION_STRING', 'sqlite:///runs.sqlite3'):
            engine = get_engine()

        self.assertEqual(engine, mock_engine)
        mock_create_engine.assert_called_once_with('sqlite:///runs.sqlite3', echo=False, pool_pre_ping=True)
        mock_base.metadata.create_all.assert_called_once_with(mock_engine)

    def test_get_engine_missing_connection_string(self):
        """Test get_engine raises ValueError when connection string is missing."""
        with patch('batched_fmaps.database.SQLALCHEMY_CONNECTION_STRING', None):
            with self.assertRaises(ValueError) as context:
                get_engine()
            self.assertIn("SQLALCHEMY_CONNECTION_STRING environment variable not set", str(context.exception))

    def test_get_engine_creates_tables(self):
        """Test a fresh in-memory database gets the run tables."""
        with patch('batched_fmaps.database.SQLALCHEMY_CONNECTION_STRING', 'sqlite:///:memory:'):
            engine = get_engine()
        tables = set(inspect(engine).get_table_names())
        self.assertEqual(tables, {'bench_runs', 'bench_results'})

    @patch('batched_fmaps.database.get_engine')
    @patch('batched_fmaps.database.sessionmaker')
    def test_get_session_maker(self, mock_sessionmaker, mock_get_engine):
        """Test get_session_maker creates and returns session maker."""
        mock_engine = MagicMock()
        mock_get_engine.return_value = mock_engine
        mock_session_maker = MagicMock()
        mock_sessionmaker.return_value = mock_session_maker

        session_maker = get_session_maker()

        self.assertEqual(session_maker, mock_session_maker)
        mock_sessionmaker.assert_called_once_with(bind=mock_engine)

    @patch('batched_fmaps.database.Base')
    @patch('batched_fmaps.database.create_engine')
    def test_get_engine_caching(self, mock_create_engine, _mock_base):
        """Test that get_engine caches the engine instance."""
        mock_create_engine.return_value = MagicMock()

        engine1 = get_engine()
        engine2 = get_engine()

        self.assertEqual(engine1, engine2)
        mock_create_engine.assert_called_once()


if __name__ == '__main__':
    unittest.main()
