"""Synthetic problem instances standing in for learned descriptors and mesh gradients."""
from dataclasses import dataclass

import numpy as np

from batched_fmaps.exceptions import InvalidParameterError
from batched_fmaps.spectral import SpectralDescriptors, Spectrum
from batched_fmaps.tangent_features import TangentField


@dataclass(frozen=True)
class SyntheticInstance:
    """Spectra and spectral descriptors of one synthetic shape pair."""
    spectrum1: Spectrum
    spectrum2: Spectrum
    descriptors1: SpectralDescriptors
    descriptors2: SpectralDescriptors

    @property
    def k(self) -> int:
        return self.spectrum1.k


def _laplacian_like_eigenvalues(k: int, rng: np.random.Generator) -> np.ndarray:
    increments = rng.uniform(0.1, 1.0, size=k - 1)
    return np.concatenate(([0.0], np.cumsum(increments)))


def generate_instance(k: int, d: int | None = None, seed: int = 0) -> SyntheticInstance:
    """Random instance with Laplacian-like spectra and Gaussian descriptors.

    Eigenvalues start at 0 and ascend strictly by positive increments; descriptors
    are standard normal scaled by 1/sqrt(d). With d >= k the Gram matrix AA^T is
    nonsingular with probability one.

    Args:
        k: Spectral resolution (>= 1)
        d: Descriptor channels (>= 1), 2k when omitted
        seed: Seed of the generator; equal seeds give equal instances

    Returns:
        The synthetic instance
    """
    if d is None:
        d = 2 * k
    if k < 1 or d < 1:
        raise InvalidParameterError(f"k and d must be >= 1, got k={k}, d={d}")

    rng = np.random.default_rng(seed)
    spectrum1 = Spectrum(_laplacian_like_eigenvalues(k, rng))
    spectrum2 = Spectrum(_laplacian_like_eigenvalues(k, rng))
    scale = 1.0 / np.sqrt(d)
    descriptors1 = SpectralDescriptors(rng.standard_normal((k, d)) * scale)
    descriptors2 = SpectralDescriptors(rng.standard_normal((k, d)) * scale)
    return SyntheticInstance(spectrum1, spectrum2, descriptors1, descriptors2)


def generate_batch(k: int, d: int | None, batch: int, seed: int) -> tuple[np.ndarray, np.ndarray, list[SyntheticInstance]]:
    """Stack `batch` instances seeded seed, seed+1, ... into b x k x d arrays."""
    instances = [generate_instance(k, d, seed + offset) for offset in range(batch)]
    a = np.stack([inst.descriptors1.values for inst in instances])
    b = np.stack([inst.descriptors2.values for inst in instances])
    return a, b, instances


def random_tangent_field(vertices: int, channels: int, rng: np.random.Generator) -> TangentField:
    """Standard normal tangent vectors."""
    return TangentField(
        rng.standard_normal((vertices, channels)), rng.standard_normal((vertices, channels))
    )


def planar_grid_tangent_field(n: int, channels: int, seed: int = 0, random_frames: bool = True) -> TangentField:
    """Gradients of random linear functions on an n x n planar grid.

    Each channel is f(u, v) = alpha u + beta v, whose gradient is the constant
    (alpha, beta); every vertex expresses it in its own randomly rotated frame,
    or in the global frame when `random_frames` is False.
    """
    if n < 2 or channels < 1:
        raise InvalidParameterError(f"need n >= 2 and channels >= 1, got n={n}, channels={channels}")
    rng = np.random.default_rng(seed)
    vertices = n * n
    coefficients = rng.standard_normal((2, channels))
    frames = rng.uniform(0.0, 2.0 * np.pi, size=vertices)
    if not random_frames:
        frames = np.zeros(vertices)
    cos, sin = np.cos(frames)[:, None], np.sin(frames)[:, None]
    alpha, beta = coefficients[0][None, :], coefficients[1][None, :]
    # Coordinates of the global gradient in a frame rotated by +angle
    x = cos * alpha + sin * beta
    y = -sin * alpha + cos * beta
    return TangentField(x, y)

