"""Spatial-gradient features on tangent-vector fields.

Tangent vectors are stored as split real/imaginary planes x and y (V x D), so the
two gradient-feature variants differ only in which plane feeds the imaginary part
of the transformed gradient:

    variant A:  (Az)_im = A_re y + A_im x    (rotation + isotropic scaling blocks)
    variant B:  (Az)_im = A_re x + A_im y    (fixed +-45 degree, anisotropic blocks)

Both return g = x * (Az)_re + y * (Az)_im.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from batched_fmaps.exceptions import DimensionMismatchError, InvalidParameterError
from batched_fmaps.spectral import Array


class Variant(Enum):
    """Gradient-feature family."""
    A = "A"
    B = "B"


@dataclass(frozen=True)
class TangentField:
    """Per-vertex, per-channel tangent vectors z = x + i y."""
    x: Array
    y: Array

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True)
        if x.ndim != 2 or x.shape != y.shape:
            raise DimensionMismatchError(f"x and y must share a V x D shape, got {x.shape} and {y.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidParameterError("tangent field has non-finite entries")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def channels(self) -> int:
        return int(self.x.shape[1])

    @classmethod
    def from_complex(cls, z: ArrayLike) -> "TangentField":
        array = np.asarray(z)
        return cls(np.real(array), np.imag(array))

    def to_complex(self) -> np.ndarray:
        return self.x + 1j * self.y


@dataclass(frozen=True)
class GradientTransform:
    """Complex channel-mixing matrix A = A_re + i A_im, D x D."""
    a_re: Array
    a_im: Array

    def __post_init__(self) -> None:
        a_re = np.array(self.a_re, dtype=np.float64, copy=True)
        a_im = np.array(self.a_im, dtype=np.float64, copy=True)
        if a_re.ndim != 2 or a_re.shape[0] != a_re.shape[1] or a_re.shape != a_im.shape:
            raise DimensionMismatchError(
                f"a_re and a_im must be equal square matrices, got {a_re.shape} and {a_im.shape}"
            )
        a_re.setflags(write=False)
        a_im.setflags(write=False)
        object.__setattr__(self, "a_re", a_re)
        object.__setattr__(self, "a_im", a_im)

    @property
    def channels(self) -> int:
        return int(self.a_re.shape[0])

    @classmethod
    def random(cls, channels: int, rng: np.random.Generator) -> "GradientTransform":
        return cls(rng.standard_normal((channels, channels)), rng.standard_normal((channels, channels)))

    def combine(self, alpha: float, other: "GradientTransform", beta: float) -> "GradientTransform":
        """alpha * self + beta * other."""
        return GradientTransform(alpha * self.a_re + beta * other.a_re, alpha * self.a_im + beta * other.a_im)


def _check_channels(w: GradientTransform, z: TangentField) -> None:
    if w.channels != z.channels:
        raise DimensionMismatchError(f"transform has {w.channels} channels, field has {z.channels}")


def apply_variant_a(w: GradientTransform, z: TangentField) -> Array:
    """Rotation-and-isotropic-scaling gradient features, V x D."""
    _check_channels(w, z)
    az_re = z.x @ w.a_re.T - z.y @ w.a_im.T
    az_im = z.y @ w.a_re.T + z.x @ w.a_im.T
    return z.x * az_re + z.y * az_im


def apply_variant_b(w: GradientTransform, z: TangentField) -> Array:
    """Fixed +-45 degree, anisotropic-scaling gradient features, V x D."""
    _check_channels(w, z)
    az_re = z.x @ w.a_re.T - z.y @ w.a_im.T
    az_im = z.x @ w.a_re.T + z.y @ w.a_im.T
    return z.x * az_re + z.y * az_im


def apply_variant(variant: Variant, w: GradientTransform, z: TangentField) -> Array:
    if variant is Variant.A:
        return apply_variant_a(w, z)
    return apply_variant_b(w, z)


def block_matrix(variant: Variant, a: float, b: float) -> Array:
    """The 2x2 block acting between channel vectors: A -> [[a, -b], [b, a]], B -> [[a, -b], [a, b]]."""
    if variant is Variant.A:
        return np.array([[a, -b], [b, a]], dtype=np.float64)
    return np.array([[a, -b], [a, b]], dtype=np.float64)


def rotation_matrix(theta: float) -> Array:
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


def block_form_reference(variant: Variant, w: GradientTransform, z: TangentField) -> Array:
    """Explicit double loop over channels: g_i = sum_j v_i^T block(a_ij, b_ij) v_j at every vertex."""
    _check_channels(w, z)
    vectors = np.stack([z.x, z.y], axis=-1)
    g = np.zeros(z.x.shape)
    for i in range(z.channels):
        for j in range(z.channels):
            block = block_matrix(variant, w.a_re[i, j], w.a_im[i, j])
            g[:, i] += np.einsum("vp,pq,vq->v", vectors[:, i], block, vectors[:, j])
    return g


def rotate_frames(z: TangentField, theta: float | ArrayLike) -> TangentField:
    """Rotate every tangent vector by theta.

    `theta` is either one global angle or one angle per vertex; all channels of a
    vertex share its frame.
    """
    angles = np.asarray(theta, dtype=np.float64)
    if angles.ndim == 0:
        cos, sin = np.cos(angles), np.sin(angles)
    elif angles.shape == (z.x.shape[0],):
        cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
    else:
        raise DimensionMismatchError(f"theta must be a scalar or have {z.x.shape[0]} entries, got {angles.shape}")
    return TangentField(cos * z.x - sin * z.y, sin * z.x + cos * z.y)


def frame_rotation_diagnostic(
        w: GradientTransform, z: TangentField, theta: float | ArrayLike
) -> tuple[Array, Array]:
    """Both variants evaluated on the field after a change of local frames.

    Returns:
        (variant A output, variant B output) for the rotated field
    """
    rotated = rotate_frames(z, theta)
    return apply_variant_a(w, rotated), apply_variant_b(w, rotated)
