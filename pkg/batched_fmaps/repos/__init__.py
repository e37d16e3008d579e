"""Repositories package."""
from .bench_run_repo import BenchRunRepository  # type: ignore

__all__ = ["BenchRunRepository"]
