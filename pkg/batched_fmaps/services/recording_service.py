"""Service for recording benchmark and verification runs."""
import logging
import uuid
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from batched_fmaps.repos.bench_run_repo import BenchRunRepository
from batched_fmaps.utils import db_session_manager

UTC = timezone.utc  # datetime.UTC alias (3.11+)


class RunStatus(Enum):
    """Recorded run status."""
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"


# noinspection PyMethodMayBeStatic
class RecordingService:
    """Persists runs and their result rows; storage failures are logged, never raised."""

    def __init__(self, repository: BenchRunRepository | None = None) -> None:
        self.repository = repository or BenchRunRepository()

    def start_run(self, command: str, config: dict[str, Any], environment: dict[str, Any]) -> str | None:
        """Start tracking a run.

        Args:
            command: CLI command being recorded (e.g., 'bench', 'verify')
            config: Command configuration
            environment: Timing-relevant environment (threads, library versions)

        Returns:
            The new run ID, or None if the run could not be stored
        """
        run_id = str(uuid.uuid4())
        entity = {
            "id": run_id,
            "command": command,
            "status": RunStatus.IN_PROGRESS.value,
            "started_at": datetime.now(UTC).isoformat(),
            "config": config,
            "environment": environment,
        }
        try:
            with db_session_manager() as db:
                created = self.repository.create_run(entity, db)
        except Exception as e:
            logging.error(f"Failed to start recording {command} run {run_id}: {e}")
            return None

        if created is None:
            logging.error(f"Failed to start recording {command} run {run_id}: repository stored nothing")
            return None
        logging.info(f"Started recording {command} run: {run_id}")
        return run_id

    def record_results(self, run_id: str, results: list[dict[str, Any]]) -> int:
        """Store result rows for a run.

        Args:
            run_id: Run identifier
            results: Rows with keys k, solver, median_ms, max_abs_diff, peak_extra_bytes, flagged

        Returns:
            Number of rows stored
        """
        try:
            with db_session_manager() as db:
                stored = self.repository.add_results(run_id, results, db)
            logging.info(f"Recorded {stored} result rows for run {run_id}")
            return stored
        except Exception as e:
            logging.error(f"Failed to record results for run {run_id}: {e}")
            return 0

    def complete_run(self, run_id: str, final_status: RunStatus, error: str | None = None) -> None:
        """Mark a run as finished.

        Args:
            run_id: Run identifier
            final_status: Final status of the run
            error: Error message for failed runs
        """
        values: dict[str, Any] = {
            "status": final_status.value,
            "finished_at": datetime.now(UTC).isoformat(),
        }
        if error is not None:
            values["error"] = error
        try:
            with db_session_manager() as db:
                self.repository.update_run(run_id, values, db)
            logging.info(f"Run {run_id} completed with status: {final_status.value}")
        except Exception as e:
            logging.error(f"Failed to complete run {run_id}: {e}")
