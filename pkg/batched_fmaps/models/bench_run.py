"""SQLAlchemy models for recorded benchmark and verification runs."""
from sqlalchemy import JSON, BigInteger, Boolean, Float, ForeignKey, Index, Integer, String, Text
from sqlalchemy.orm import Mapped, mapped_column, relationship

from batched_fmaps.models.base import Base


class BenchRun(Base):
    """One invocation of a recorded command."""
    __tablename__ = "bench_runs"

    id: Mapped[str] = mapped_column(String(36), primary_key=True)
    command: Mapped[str] = mapped_column(String(32), nullable=False)
    status: Mapped[str] = mapped_column(String(16), nullable=False)
    started_at: Mapped[str] = mapped_column(String(64), nullable=False)
    finished_at: Mapped[str | None] = mapped_column(String(64))
    config: Mapped[dict | None] = mapped_column(JSON)
    environment: Mapped[dict | None] = mapped_column(JSON)
    error: Mapped[str | None] = mapped_column(Text)

    results: Mapped[list["BenchResult"]] = relationship(
        back_populates="run", cascade="all, delete-orphan", order_by="BenchResult.id"
    )


class BenchResult(Base):
    """One solver measurement (bench) or one pairwise comparison (verify) of a run."""
    __tablename__ = "bench_results"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(ForeignKey("bench_runs.id"), nullable=False)
    k: Mapped[int] = mapped_column(Integer, nullable=False)
    solver: Mapped[str] = mapped_column(String(32), nullable=False)
    median_ms: Mapped[float | None] = mapped_column(Float)
    max_abs_diff: Mapped[float | None] = mapped_column(Float)
    peak_extra_bytes: Mapped[int | None] = mapped_column(BigInteger)
    flagged: Mapped[bool] = mapped_column(Boolean, nullable=False, default=False)

    run: Mapped[BenchRun] = relationship(back_populates="results")

    __table_args__ = (
        Index('idx_bench_results_run_k', 'run_id', 'k'),
    )
