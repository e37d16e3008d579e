"""Service for degenerate-predictor metric sweeps."""
import logging
from dataclasses import dataclass
from typing import TextIO

from batched_fmaps.exceptions import InvalidParameterError
from batched_fmaps.overlap_metrics import (
    ConfusionCounts,
    OverlapScenario,
    Predictor,
    SweepRow,
    expected_confusion,
    monte_carlo_confusion,
    sweep_ratio,
)
from batched_fmaps.utils import write_csv_report

SWEEP_COLUMNS = ("r", "predictor", "metric", "value", "degenerate_flag")


@dataclass(frozen=True)
class MonteCarloCheck:
    """Empirical counts of a predictor against their expectation."""
    scenario: OverlapScenario
    empirical: ConfusionCounts
    expected: ConfusionCounts
    max_relative_error: float


# noinspection PyMethodMayBeStatic
class MetricsService:
    """Sweeps the overlap metrics of degenerate predictors over the overlap ratio."""

    def predictors(self, probability: float = 0.5) -> list[Predictor]:
        """Zeros, Ones and Random(probability)."""
        return [Predictor.zeros(), Predictor.ones(), Predictor.random(probability)]

    def sweep(self, total: float, steps: int, probability: float = 0.5) -> list[SweepRow]:
        """Expected-count sweep of all seven metrics.

        Args:
            total: Region size N
            steps: Grid points on [0, 1], both ends included
            probability: Positive rate of the Random predictor

        Returns:
            Rows ordered by predictor, metric and r
        """
        rows = sweep_ratio(self.predictors(probability), total, steps)
        degenerate = sum(1 for row in rows if row.degenerate)
        logging.info(f"metrics_service.sweep: {len(rows)} rows, {degenerate} with a zero denominator")
        return rows

    def write_sweep(self, rows: list[SweepRow], stream: TextIO) -> int:
        """Write sweep rows as CSV with the r,predictor,metric,value,degenerate_flag header."""
        return write_csv_report(
            stream,
            SWEEP_COLUMNS,
            ((row.ratio, row.predictor, row.metric.value, row.value, row.degenerate) for row in rows),
        )

    def monte_carlo_check(
            self, predictor: Predictor, ratio: float, total: int, seed: int = 0, trials: int = 100
    ) -> MonteCarloCheck:
        """Compare seeded Monte Carlo counts against the expected counts.

        The relative error is taken over the non-zero expected counts; zero expected
        counts must be matched exactly.
        """
        if total < 1:
            raise InvalidParameterError(f"total must be >= 1, got {total}")
        scenario = OverlapScenario(ratio, total, predictor)
        empirical = monte_carlo_confusion(scenario, seed, trials)
        expected = expected_confusion(scenario)

        worst = 0.0
        for got, want in zip(empirical.as_tuple(), expected.as_tuple()):
            if want == 0:
                worst = max(worst, 0.0 if got == 0 else float("inf"))
            else:
                worst = max(worst, abs(got - want) / want)
        logging.info(
            f"metrics_service.monte_carlo_check: {predictor.name} r={ratio} N={total} "
            f"trials={trials} max relative error {worst:.4f}"
        )
        return MonteCarloCheck(scenario, empirical, expected, worst)
