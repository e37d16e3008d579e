"""Services package."""
from .bench_service import BenchConfig, BenchService, MaskKind, Precision  # type: ignore
from .gradfeat_service import GradFeatConfig, GradFeatService  # type: ignore
from .metrics_service import MetricsService  # type: ignore
from .recording_service import RecordingService, RunStatus  # type: ignore

__all__ = [
    "BenchConfig",
    "BenchService",
    "MaskKind",
    "Precision",
    "GradFeatConfig",
    "GradFeatService",
    "MetricsService",
    "RecordingService",
    "RunStatus",
]
