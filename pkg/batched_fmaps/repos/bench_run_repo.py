"""Repository for recorded runs"""
import logging
from typing import Any

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from batched_fmaps.models.bench_run import BenchResult, BenchRun


# noinspection PyMethodMayBeStatic
class BenchRunRepository:
    """Repository for recorded runs"""
    def create_run(self, run: dict[str, Any], db: Session) -> BenchRun | None:
        """Insert a new run

        Args:
            run (dict[str, Any]): Run columns; must contain 'id'
            db (Session): Database session

        Returns:
            BenchRun | None: The new run, or None if it could not be stored
        """
        run_id: str | None = run.get("id")
        logging.debug(f"BenchRunRepository.create_run: run_id: {run_id}")

        if not run_id:
            logging.error("bench_run_repository.create_run: Error creating run: Run must have an id")
            return None

        columns = {column.key for column in BenchRun.__table__.columns}
        try:
            bench_run = BenchRun(**{key: value for key, value in run.items() if key in columns})
            db.add(bench_run)
            db.flush()
            return bench_run
        except SQLAlchemyError as e:
            logging.error(f"bench_run_repository.create_run: Database error creating run {run_id}: {e}")
            return None

    def add_results(self, run_id: str, results: list[dict[str, Any]], db: Session) -> int:
        """Attach result rows to a run

        Args:
            run_id (str): Run ID
            results (list[dict[str, Any]]): Result columns per row
            db (Session): Database session

        Returns:
            int: Number of rows stored
        """
        columns = {column.key for column in BenchResult.__table__.columns} - {"id", "run_id"}
        try:
            rows = [
                BenchResult(run_id=run_id, **{key: value for key, value in result.items() if key in columns})
                for result in results
            ]
            db.add_all(rows)
            db.flush()
            return len(rows)
        except SQLAlchemyError as e:
            logging.error(f"bench_run_repository.add_results: Database error adding results to run {run_id}: {e}")
            return 0

    def update_run(self, run_id: str, values: dict[str, Any], db: Session) -> bool:
        """Update columns of an existing run

        Args:
            run_id (str): Run ID
            values (dict[str, Any]): Columns to set
            db (Session): Database session

        Returns:
            bool: True if the run existed and was updated
        """
        try:
            bench_run = db.get(BenchRun, run_id)
            if bench_run is None:
                logging.error(f"bench_run_repository.update_run: Run {run_id} not found")
                return False
            for key, value in values.items():
                setattr(bench_run, key, value)
            db.flush()
            return True
        except SQLAlchemyError as e:
            logging.error(f"bench_run_repository.update_run: Database error updating run {run_id}: {e}")
            return False
