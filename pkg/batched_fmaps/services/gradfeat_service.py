"""Service for the algebraic checks of the two gradient-feature variants."""
import logging
from dataclasses import dataclass

import numpy as np

from batched_fmaps.exceptions import InvalidParameterError
from batched_fmaps.synthetic import planar_grid_tangent_field, random_tangent_field
from batched_fmaps.tangent_features import (
    GradientTransform,
    TangentField,
    Variant,
    apply_variant,
    apply_variant_a,
    apply_variant_b,
    block_form_reference,
    block_matrix,
    frame_rotation_diagnostic,
    rotate_frames,
    rotation_matrix,
)

GRADFEAT_COLUMNS = ("check", "statistic", "tolerance", "passed")

BLOCK_FORM_TOLERANCE = 1e-12
INVARIANCE_TOLERANCE = 1e-10
SENSITIVITY_THRESHOLD = 1e-6
SENSITIVITY_MIN_FRACTION = 0.99


@dataclass(frozen=True)
class GradFeatConfig:
    """Sizes and draws of the gradient-feature checks."""
    channels: int = 8
    vertices: int = 64
    seed: int = 0
    trials: int = 100
    angles: int = 8
    sensitivity_angle: float = np.pi / 6
    grid_size: int = 8

    def __post_init__(self) -> None:
        if self.channels < 1 or self.vertices < 1:
            raise InvalidParameterError(
                f"channels and vertices must be >= 1, got D={self.channels}, V={self.vertices}"
            )
        if self.trials < 1 or self.angles < 1:
            raise InvalidParameterError(f"trials and angles must be >= 1, got {self.trials} and {self.angles}")
        if self.grid_size < 2:
            raise InvalidParameterError(f"grid_size must be >= 2, got {self.grid_size}")


@dataclass(frozen=True)
class GradFeatCheck:
    """Outcome of one check: the statistic must not exceed the tolerance, or reach it for fractions."""
    check: str
    statistic: float
    tolerance: float
    passed: bool


def _max_abs(first: np.ndarray, second: np.ndarray) -> float:
    return float(np.max(np.abs(first - second)))


# noinspection PyMethodMayBeStatic
class GradFeatService:
    """Runs block-form, frame-invariance, sensitivity and coincidence checks on random fields."""

    def _draws(self, config: GradFeatConfig, rng: np.random.Generator) -> list[tuple[GradientTransform, TangentField]]:
        return [
            (GradientTransform.random(config.channels, rng), random_tangent_field(config.vertices, config.channels, rng))
            for _ in range(config.trials)
        ]

    def _bounded(self, name: str, statistic: float, tolerance: float) -> GradFeatCheck:
        return GradFeatCheck(name, statistic, tolerance, statistic <= tolerance)

    def block_form(self, variant: Variant, draws: list[tuple[GradientTransform, TangentField]]) -> GradFeatCheck:
        worst = max(_max_abs(apply_variant(variant, w, z), block_form_reference(variant, w, z)) for w, z in draws)
        return self._bounded(f"block_form_{variant.value}", worst, BLOCK_FORM_TOLERANCE)

    def variant_a_invariance(self, config: GradFeatConfig, draws: list[tuple[GradientTransform, TangentField]]) -> GradFeatCheck:
        angles = 2.0 * np.pi * np.arange(config.angles) / config.angles + np.pi / 7
        worst = 0.0
        for w, z in draws:
            reference = apply_variant_a(w, z)
            for theta in angles:
                rotated_a, _ = frame_rotation_diagnostic(w, z, theta)
                worst = max(worst, _max_abs(rotated_a, reference))
        return self._bounded("variant_A_frame_invariance", worst, INVARIANCE_TOLERANCE)

    def identity_rotation(self, draws: list[tuple[GradientTransform, TangentField]]) -> GradFeatCheck:
        worst = 0.0
        for w, z in draws:
            rotated_a, rotated_b = frame_rotation_diagnostic(w, z, 0.0)
            worst = max(worst, _max_abs(rotated_a, apply_variant_a(w, z)), _max_abs(rotated_b, apply_variant_b(w, z)))
        return self._bounded("zero_angle_identity", worst, 0.0)

    def variant_b_sensitivity(self, config: GradFeatConfig, draws: list[tuple[GradientTransform, TangentField]]) -> GradFeatCheck:
        moved = 0
        for w, z in draws:
            _, rotated_b = frame_rotation_diagnostic(w, z, config.sensitivity_angle)
            if _max_abs(rotated_b, apply_variant_b(w, z)) > SENSITIVITY_THRESHOLD:
                moved += 1
        fraction = moved / len(draws)
        return GradFeatCheck("variant_B_frame_sensitivity", fraction, SENSITIVITY_MIN_FRACTION,
                             fraction >= SENSITIVITY_MIN_FRACTION)

    def coincidence(self, draws: list[tuple[GradientTransform, TangentField]]) -> GradFeatCheck:
        worst = 0.0
        for w, z in draws:
            real_w = GradientTransform(w.a_re, np.zeros_like(w.a_im))
            real_z = TangentField(z.x, np.zeros_like(z.y))
            worst = max(worst, _max_abs(apply_variant_a(real_w, real_z), apply_variant_b(real_w, real_z)))
        return self._bounded("coincidence_set", worst, BLOCK_FORM_TOLERANCE)

    def linearity(self, draws: list[tuple[GradientTransform, TangentField]], rng: np.random.Generator) -> GradFeatCheck:
        worst = 0.0
        for w, z in draws:
            other = GradientTransform.random(w.channels, rng)
            alpha, beta = rng.standard_normal(2)
            combined = w.combine(alpha, other, beta)
            for variant in Variant:
                expected = alpha * apply_variant(variant, w, z) + beta * apply_variant(variant, other, z)
                worst = max(worst, _max_abs(apply_variant(variant, combined, z), expected))
        return self._bounded("transform_linearity", worst, BLOCK_FORM_TOLERANCE)

    def per_vertex_invariance(self, draws: list[tuple[GradientTransform, TangentField]], rng: np.random.Generator) -> GradFeatCheck:
        worst = 0.0
        for w, z in draws:
            angles = rng.uniform(0.0, 2.0 * np.pi, size=z.x.shape[0])
            worst = max(worst, _max_abs(apply_variant_a(w, rotate_frames(z, angles)), apply_variant_a(w, z)))
        return self._bounded("variant_A_per_vertex_invariance", worst, INVARIANCE_TOLERANCE)

    def block_b_rotation(self) -> GradFeatCheck:
        """The variant-B block with a = b = 1 is sqrt(2) times a 45 degree rotation."""
        statistic = _max_abs(block_matrix(Variant.B, 1.0, 1.0), np.sqrt(2.0) * rotation_matrix(np.pi / 4))
        return self._bounded("block_B_is_scaled_45_rotation", statistic, BLOCK_FORM_TOLERANCE)

    def planar_grid_frames(self, config: GradFeatConfig, rng: np.random.Generator) -> GradFeatCheck:
        """Variant A on linear-function gradients does not see the per-vertex frames."""
        grid_seed = int(rng.integers(0, 2 ** 31))
        local = planar_grid_tangent_field(config.grid_size, config.channels, grid_seed, random_frames=True)
        global_frame = planar_grid_tangent_field(config.grid_size, config.channels, grid_seed, random_frames=False)
        w = GradientTransform.random(config.channels, rng)
        statistic = _max_abs(apply_variant_a(w, local), apply_variant_a(w, global_frame))
        return self._bounded("planar_grid_frame_invariance", statistic, INVARIANCE_TOLERANCE)

    def run_checks(self, config: GradFeatConfig) -> tuple[list[GradFeatCheck], bool]:
        """Run every check on `config.trials` seeded random draws.

        Returns:
            Check outcomes and whether all of them passed
        """
        rng = np.random.default_rng(config.seed)
        draws = self._draws(config, rng)
        checks = [
            self.block_form(Variant.A, draws),
            self.block_form(Variant.B, draws),
            self.variant_a_invariance(config, draws),
            self.identity_rotation(draws),
            self.variant_b_sensitivity(config, draws),
            self.coincidence(draws),
            self.linearity(draws, rng),
            self.per_vertex_invariance(draws, rng),
            self.block_b_rotation(),
            self.planar_grid_frames(config, rng),
        ]
        for check in checks:
            if check.passed:
                logging.info(f"gradfeat_service: {check.check} passed ({check.statistic:.3e})")
            else:
                logging.warning(
                    f"gradfeat_service: {check.check} failed: {check.statistic:.3e} vs {check.tolerance:.3e}"
                )
        return checks, all(check.passed for check in checks)
