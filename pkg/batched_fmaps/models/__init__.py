"""Models package."""
from .base import Base  # type: ignore
from .bench_run import BenchRun, BenchResult  # type: ignore

__all__ = ["Base", "BenchRun", "BenchResult"]
