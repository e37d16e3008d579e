"""Confusion counts, overlap-prediction metrics and degenerate-predictor analysis."""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from batched_fmaps.exceptions import DimensionMismatchError, InvalidParameterError


class Metric(Enum):
    """Overlap-prediction metrics."""
    ACCURACY = "Accuracy"
    PRECISION = "Precision"
    SENSITIVITY = "Sensitivity"
    SPECIFICITY = "Specificity"
    IOU = "IoU"
    F1 = "F1"
    BALANCED_ACCURACY = "BalancedAccuracy"


class PredictorKind(Enum):
    """Kinds of overlap predictor."""
    ZEROS = "Zeros"
    ONES = "Ones"
    RANDOM = "Random"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class ConfusionCounts:
    """TP/FP/FN/TN as non-negative reals, so expected counts like r*N/2 fit."""
    tp: float
    fp: float
    fn: float
    tn: float

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0:
                raise InvalidParameterError(f"{name} must be a finite non-negative number, got {value}")
            object.__setattr__(self, name, value)

    @property
    def total(self) -> float:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionCounts":
        """Relabel the classes: positives become negatives and vice versa."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.tp, self.fp, self.fn, self.tn


@dataclass(frozen=True)
class MetricValue:
    """A metric in [0, 1]; `degenerate` marks a zero denominator (value then 0)."""
    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class Predictor:
    """A degenerate predictor or a custom pair of masks."""
    kind: PredictorKind
    probability: float = 0.5
    predicted: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidParameterError(f"probability must lie in [0, 1], got {self.probability}")
        if self.kind is PredictorKind.CUSTOM and self.predicted is None:
            raise InvalidParameterError("a Custom predictor needs a predicted mask")

    @property
    def name(self) -> str:
        if self.kind is PredictorKind.RANDOM and self.probability != 0.5:
            return f"Random({self.probability:g})"
        return self.kind.value

    @classmethod
    def zeros(cls) -> "Predictor":
        return cls(PredictorKind.ZEROS)

    @classmethod
    def ones(cls) -> "Predictor":
        return cls(PredictorKind.ONES)

    @classmethod
    def random(cls, probability: float = 0.5) -> "Predictor":
        return cls(PredictorKind.RANDOM, probability=probability)

    @classmethod
    def custom(cls, predicted: ArrayLike) -> "Predictor":
        return cls(PredictorKind.CUSTOM, predicted=tuple(bool(v) for v in np.asarray(predicted).ravel()))


DEGENERATE_PREDICTORS: tuple[Predictor, ...] = (Predictor.zeros(), Predictor.ones(), Predictor.random())


@dataclass(frozen=True)
class OverlapScenario:
    """Overlap ratio r of a region of total size N, scored with one predictor."""
    ratio: float
    total: float
    predictor: Predictor

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise InvalidParameterError(f"overlap ratio must lie in [0, 1], got {self.ratio}")
        if self.total <= 0:
            raise InvalidParameterError(f"total must be positive, got {self.total}")


@dataclass(frozen=True)
class SweepRow:
    """One (r, predictor, metric) point of a ratio sweep."""
    ratio: float
    predictor: str
    metric: Metric
    value: float
    degenerate: bool


def confusion_from_masks(predicted: ArrayLike, truth: ArrayLike) -> ConfusionCounts:
    """Count TP/FP/FN/TN between a predicted and a ground-truth boolean mask."""
    pred = np.asarray(predicted).astype(bool).ravel()
    gt = np.asarray(truth).astype(bool).ravel()
    if pred.size != gt.size:
        raise DimensionMismatchError(f"mask lengths differ: {pred.size} vs {gt.size}")
    if pred.size == 0:
        raise DimensionMismatchError("masks must not be empty")

    tp = int(np.sum(pred & gt))
    fp = int(np.sum(pred & ~gt))
    fn = int(np.sum(~pred & gt))
    tn = int(np.sum(~pred & ~gt))
    return ConfusionCounts(tp, fp, fn, tn)


def expected_confusion(scenario: OverlapScenario) -> ConfusionCounts:
    """Expected confusion counts of a degenerate predictor.

    Zeros -> (0, 0, rN, (1-r)N); Ones -> (rN, (1-r)N, 0, 0);
    Random(p) -> (p rN, p (1-r)N, (1-p) rN, (1-p)(1-r)N).
    """
    r, n = scenario.ratio, scenario.total
    positives, negatives = r * n, (1.0 - r) * n
    predictor = scenario.predictor
    if predictor.kind is PredictorKind.ZEROS:
        return ConfusionCounts(0.0, 0.0, positives, negatives)
    if predictor.kind is PredictorKind.ONES:
        return ConfusionCounts(positives, negatives, 0.0, 0.0)
    if predictor.kind is PredictorKind.RANDOM:
        p = predictor.probability
        return ConfusionCounts(p * positives, p * negatives, (1.0 - p) * positives, (1.0 - p) * negatives)
    raise InvalidParameterError("Custom predictors have no expected counts; use confusion_from_masks")


def _ratio(numerator: float, denominator: float) -> MetricValue:
    if denominator == 0:
        return MetricValue(0.0, degenerate=True)
    return MetricValue(numerator / denominator)


def metric(counts: ConfusionCounts, which: Metric) -> MetricValue:
    """Evaluate one metric on confusion counts.

    A zero denominator yields value 0 with the degenerate flag set; balanced
    accuracy is degenerate when either of its halves is.
    """
    if counts.total == 0:
        raise InvalidParameterError("confusion counts are all zero")
    tp, fp, fn, tn = counts.as_tuple()

    if which is Metric.ACCURACY:
        return _ratio(tp + tn, tp + fp + fn + tn)
    if which is Metric.PRECISION:
        return _ratio(tp, tp + fp)
    if which is Metric.SENSITIVITY:
        return _ratio(tp, tp + fn)
    if which is Metric.SPECIFICITY:
        return _ratio(tn, tn + fp)
    if which is Metric.IOU:
        return _ratio(tp, tp + fp + fn)
    if which is Metric.F1:
        return _ratio(2 * tp, 2 * tp + fp + fn)
    if which is Metric.BALANCED_ACCURACY:
        sensitivity = metric(counts, Metric.SENSITIVITY)
        specificity = metric(counts, Metric.SPECIFICITY)
        return MetricValue(
            (sensitivity.value + specificity.value) / 2,
            degenerate=sensitivity.degenerate or specificity.degenerate,
        )
    raise InvalidParameterError(f"Unknown metric: {which}")


def evaluate_all(counts: ConfusionCounts) -> dict[Metric, MetricValue]:
    """All seven metrics for one set of counts."""
    return {which: metric(counts, which) for which in Metric}


def sweep_ratio(predictors: list[Predictor], total: float, steps: int) -> list[SweepRow]:
    """Evaluate every metric for each predictor on an evenly spaced grid of r in [0, 1].

    Args:
        predictors: Zeros/Ones/Random predictors
        total: Region size N
        steps: Number of grid points including both ends (>= 2)

    Returns:
        Rows ordered by predictor, then metric, then r
    """
    if steps < 2:
        raise InvalidParameterError(f"steps must be >= 2, got {steps}")
    ratios = np.linspace(0.0, 1.0, steps)
    rows: list[SweepRow] = []
    for predictor in predictors:
        evaluations = [
            (float(r), evaluate_all(expected_confusion(OverlapScenario(float(r), total, predictor))))
            for r in ratios
        ]
        for which in Metric:
            for r, values in evaluations:
                result = values[which]
                rows.append(SweepRow(r, predictor.name, which, result.value, result.degenerate))
    logging.debug(f"sweep_ratio: {len(predictors)} predictors x {steps} steps -> {len(rows)} rows")
    return rows


def monte_carlo_confusion(scenario: OverlapScenario, seed: int, trials: int) -> ConfusionCounts:
    """Mean confusion counts of a predictor over seeded random trials.

    The first rN vertices are the true overlap, so rN must be a whole number of
    vertices; Random draws each vertex independently, Zeros and Ones are
    deterministic.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if float(scenario.total) != int(scenario.total):
        raise InvalidParameterError(f"Monte Carlo needs an integer N, got {scenario.total}")

    n = int(scenario.total)
    positives = scenario.ratio * n
    overlap = round(positives)
    if abs(positives - overlap) > 1e-9 * max(n, 1):
        raise InvalidParameterError(
            f"Monte Carlo needs an integer overlap rN, got r={scenario.ratio} and N={n} (rN={positives})"
        )
    truth = np.zeros(n, dtype=bool)
    truth[:overlap] = True
    predictor = scenario.predictor
    rng = np.random.default_rng(seed)

    sums = np.zeros(4)
    for _ in range(trials):
        if predictor.kind is PredictorKind.ZEROS:
            predicted = np.zeros(n, dtype=bool)
        elif predictor.kind is PredictorKind.ONES:
            predicted = np.ones(n, dtype=bool)
        elif predictor.kind is PredictorKind.RANDOM:
            predicted = rng.random(n) < predictor.probability
        else:
            predicted = np.asarray(predictor.predicted, dtype=bool)
        sums += confusion_from_masks(predicted, truth).as_tuple()

    mean = sums / trials
    return ConfusionCounts(*(float(v) for v in mean))
