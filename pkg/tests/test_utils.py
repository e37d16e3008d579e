import io
import os
import unittest
from unittest.mock import MagicMock, patch

from sqlalchemy.exc import SQLAlchemyError

os.environ['SQLALCHEMY_CONNECTION_STRING'] = 'sqlite:///:memory:'

from batched_fmaps.utils import db_session_manager, format_csv_value, median_wall_time_ms, write_csv_report


class TestUtils(unittest.TestCase):

    @patch('batched_fmaps.utils.get_session_maker')
    def test_db_session_manager_success(self, mock_get_session_maker):
        """Test db_session_manager commits on success."""
        mock_session = MagicMock()
        mock_get_session_maker.return_value = MagicMock(return_value=mock_session)

        with db_session_manager() as session:
            session.add(MagicMock())

        mock_session.commit.assert_called_once()
        mock_session.close.assert_called_once()
        mock_session.rollback.assert_not_called()

    @patch('batched_fmaps.utils.get_session_maker')
    @patch('batched_fmaps.utils.logging')
    def test_db_session_manager_exception(self, mock_logging, mock_get_session_maker):
        """Test db_session_manager rolls back on exception."""
        mock_session = MagicMock()
        mock_get_session_maker.return_value = MagicMock(return_value=mock_session)

        with self.assertRaises(SQLAlchemyError):
            with db_session_manager():
                raise SQLAlchemyError("Test error")

        mock_session.rollback.assert_called_once()
        mock_session.close.assert_called_once()
        mock_session.commit.assert_not_called()
        mock_logging.error.assert_called_once()

    @patch('batched_fmaps.utils.get_session_maker')
    def test_db_session_manager_yields_session(self, mock_get_session_maker):
        """Test db_session_manager yields the correct session."""
        mock_session = MagicMock()
        mock_get_session_maker.return_value = MagicMock(return_value=mock_session)

        with db_session_manager() as session:
            self.assertEqual(session, mock_session)

    def test_format_csv_value(self):
        """Test float, bool, None and passthrough formatting."""
        self.assertEqual(format_csv_value(0.1), '0.10000000000000001')
        self.assertEqual(float(format_csv_value(1 / 3)), 1 / 3)
        self.assertEqual(format_csv_value(0.1, digits=9), '0.1')
        self.assertEqual(format_csv_value(True), '1')
        self.assertEqual(format_csv_value(False), '0')
        self.assertEqual(format_csv_value(None), '')
        self.assertEqual(format_csv_value(300), '300')
        self.assertEqual(format_csv_value('batched'), 'batched')

    def test_median_wall_time_ms_runs_warmup_and_repetitions(self):
        """Test the callable is invoked warmup + repetitions times."""
        func = MagicMock()
        with patch('batched_fmaps.utils.time.perf_counter_ns', side_effect=[0, 1_000_000, 0, 3_000_000, 0, 2_000_000]):
            median = median_wall_time_ms(func, repetitions=3, warmup=2)
        self.assertEqual(func.call_count, 5)
        self.assertEqual(median, 2.0)

    def test_write_csv_report(self):
        """Test header comments, column row and formatted rows."""
        stream = io.StringIO()
        count = write_csv_report(stream, ('k', 'value', 'flag'), [(20, 0.5, True), (30, None, False)],
                                 header_lines=['protocol'])
        self.assertEqual(count, 2)
        self.assertEqual(stream.getvalue(), '# protocol\nk,value,flag\n20,0.5,1\n30,,0\n')


if __name__ == '__main__':
    unittest.main()
