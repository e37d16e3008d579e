"""Shared utility functions for the toolkit."""
import csv
import logging
import statistics
import time
from contextlib import contextmanager
from typing import Any, Callable, Generator, Iterable, Sequence, TextIO

from sqlalchemy.orm import Session

from batched_fmaps.database import get_session_maker


@contextmanager
def db_session_manager() -> Generator[Session, None, None]:
    """
    Provide a transactional scope around a series of operations.
    Handles session creation, commit, rollback, and closing.
    """
    session_maker = get_session_maker()
    db = session_maker()
    try:
        yield db
        db.commit()
    except Exception as e:
        logging.error(f"Session rollback due to exception: {e}", exc_info=True)
        db.rollback()
        raise
    finally:
        db.close()


def format_csv_value(value: Any, digits: int = 17) -> str:
    """Format a value for CSV output.

    Floats use `digits` significant digits (17 round-trips a float64 exactly),
    booleans become 0/1 and None becomes an empty field.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, f".{digits}g")
    return str(value)


def median_wall_time_ms(func: Callable[[], Any], repetitions: int, warmup: int) -> float:
    """Median wall time of `func` in milliseconds on the monotonic clock.

    Args:
        func: Zero-argument callable to time
        repetitions: Number of timed calls (>= 1)
        warmup: Number of untimed calls made first and discarded

    Returns:
        Median of the timed calls in milliseconds
    """
    for _ in range(warmup):
        func()

    samples: list[float] = []
    for _ in range(repetitions):
        start = time.perf_counter_ns()
        func()
        samples.append((time.perf_counter_ns() - start) / 1e6)

    return statistics.median(samples)


def write_csv_report(
        stream: TextIO,
        columns: Sequence[str],
        rows: Iterable[Sequence[Any]],
        header_lines: Sequence[str] = (),
        digits: int = 17,
) -> int:
    """Write `# `-prefixed header lines, a column row and formatted data rows.

    Returns:
        Number of data rows written
    """
    for line in header_lines:
        stream.write(f"# {line}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_csv_value(value, digits) for value in row])
        count += 1
    return count
