"""Camera degradations: focus blur, exposure swings, additive sensor grain.

Every operation preserves image dimensions, rounds half away from zero after
filtering, and clamps to the 8-bit range. Border handling is symmetric
reflection so the exposure model does not darken edges.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import ImageBuffer, NoiseLevel, RngStream

__all__ = [
    "CameraNoiseKind",
    "ExposureDirection",
    "Kernel2D",
    "blur_kernel_size",
    "gaussian_sigma_for_size",
    "gaussian_kernel",
    "apply_blur",
    "exposure_kernel",
    "apply_exposure",
    "additive_noise_map",
    "apply_additive_noise",
    "degrade_image",
]


class CameraNoiseKind(enum.Enum):
    BLUR = "blur"
    HIGH_EXPOSURE = "high_exposure"
    LOW_EXPOSURE = "low_exposure"
    ADDITIVE = "additive"

    @classmethod
    def from_name(cls, name: str) -> "CameraNoiseKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown camera noise kind {name!r} (valid: {valid})") from None


class ExposureDirection(enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """Square odd-sized convolution kernel with non-negative weights."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"kernel must be square, got shape {w.shape}")
        if w.shape[0] % 2 == 0 or w.shape[0] < 1:
            raise ValueError(f"kernel size must be odd and >= 1, got {w.shape[0]}")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("kernel weights must be finite and non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def weight_sum(self) -> float:
        return float(self.weights.sum())


def _quantize(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], return uint8."""
    rounded = np.copysign(np.floor(np.abs(values) + 0.5), values)
    return np.clip(rounded, 0.0, 255.0).astype(np.uint8)


def blur_kernel_size(level: NoiseLevel) -> int:
    """Odd Gaussian width, growing by two pixels per percent of noise."""
    return 2 * int(math.floor(level.percent() + 0.5)) + 1


def gaussian_sigma_for_size(size: int) -> float:
    """Default width rule for a size-parameterized Gaussian kernel.

    The degradation dial only fixes the kernel size; this spread rule is a
    common default and can be overridden via the ``sigma`` arguments below.
    """
    return 0.3 * ((size - 1) / 2.0 - 1.0) + 0.8


def _gaussian_taps(size: int, sigma: float | None = None) -> np.ndarray:
    if size < 1 or size % 2 == 0:
        raise ValueError(f"Gaussian kernel size must be odd and >= 1, got {size}")
    if size == 1:
        return np.array([1.0])
    if sigma is None:
        sigma = gaussian_sigma_for_size(size)
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_kernel(size: int, sigma: float | None = None) -> Kernel2D:
    """Separable 2-D Gaussian normalized to unit sum; size 1 is the identity."""
    taps = _gaussian_taps(size, sigma)
    weights = np.outer(taps, taps)
    return Kernel2D(weights / weights.sum())


def apply_blur(img: ImageBuffer, level: NoiseLevel, sigma: float | None = None) -> ImageBuffer:
    """Convolve each channel with the level-sized Gaussian."""
    size = blur_kernel_size(level)
    if size == 1:
        return ImageBuffer(img.data.copy())
    taps = _gaussian_taps(size, sigma)
    field = img.data.astype(np.float64)
    for axis in (0, 1):
        field = ndimage.correlate1d(field, taps, axis=axis, mode="reflect")
    return ImageBuffer(_quantize(field))


_EXPOSURE_BASE = np.array(
    [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]]
) / 16.0


def exposure_kernel(level: NoiseLevel, direction: ExposureDirection) -> Kernel2D:
    """3x3 smoothing kernel scaled by (1 + 3n) up or 1/(1 + 3n) down."""
    factor = 1.0 + 3.0 * level.n
    if direction is ExposureDirection.HIGH:
        return Kernel2D(_EXPOSURE_BASE * factor)
    if direction is ExposureDirection.LOW:
        return Kernel2D(_EXPOSURE_BASE / factor)
    raise ValueError(f"unknown exposure direction {direction!r}")


def apply_exposure(
    img: ImageBuffer, level: NoiseLevel, direction: ExposureDirection
) -> ImageBuffer:
    """Brighten or darken with a smoothing 3x3 kernel."""
    kernel = exposure_kernel(level, direction)
    field = img.data.astype(np.float64)
    out = np.empty_like(field)
    for ch in range(3):
        out[..., ch] = ndimage.correlate(field[..., ch], kernel.weights, mode="reflect")
    return ImageBuffer(_quantize(out))


def additive_noise_map(
    shape: tuple[int, ...],
    level: NoiseLevel,
    rng: RngStream,
    shared_channels: bool = False,
) -> np.ndarray:
    """Zero-mean Gaussian intensity noise with std of one unit per percent.

    ``shared_channels`` draws one value per pixel and repeats it across the
    channel axis (requires a 3-D shape); the default draws independently per
    pixel and channel.
    """
    sigma = level.percent()
    if sigma == 0.0:
        return np.zeros(shape, dtype=np.float64)
    gen = rng.generator()
    if shared_channels:
        if len(shape) != 3:
            raise ValueError("shared_channels requires an HxWxC shape")
        plane = gen.normal(0.0, sigma, size=shape[:2])
        return np.repeat(plane[:, :, None], shape[2], axis=2)
    return gen.normal(0.0, sigma, size=shape)


def apply_additive_noise(
    img: ImageBuffer,
    level: NoiseLevel,
    rng: RngStream,
    shared_channels: bool = False,
) -> ImageBuffer:
    """Add per-pixel Gaussian grain."""
    if level.n == 0.0:
        return ImageBuffer(img.data.copy())
    noise = additive_noise_map(img.data.shape, level, rng, shared_channels)
    return ImageBuffer(_quantize(img.data.astype(np.float64) + noise))


def degrade_image(
    img: ImageBuffer,
    kind: CameraNoiseKind,
    level: NoiseLevel,
    rng: RngStream,
    sigma: float | None = None,
    shared_channels: bool = False,
) -> ImageBuffer:
    """Apply one degradation kind; only the additive kind consumes ``rng``."""
    if kind is CameraNoiseKind.BLUR:
        return apply_blur(img, level, sigma)
    if kind is CameraNoiseKind.HIGH_EXPOSURE:
        return apply_exposure(img, level, ExposureDirection.HIGH)
    if kind is CameraNoiseKind.LOW_EXPOSURE:
        return apply_exposure(img, level, ExposureDirection.LOW)
    if kind is CameraNoiseKind.ADDITIVE:
        return apply_additive_noise(img, level, rng, shared_channels)
    raise ValueError(f"unknown camera noise kind {kind!r}")
