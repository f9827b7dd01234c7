"""Shared domain types for the sensor degradation toolkit.

All types are immutable values and all functions are pure, so everything in
this module is safe to share across worker threads and processes.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "NoiseLevel",
    "RadarPoint",
    "RadarFrame",
    "ImageBuffer",
    "SensorModel",
    "RngStream",
    "snr_scale",
    "accuracy_scale",
    "to_polar",
    "from_polar",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseLevel:
    """Degradation dial shared by the camera and radar synthesizers.

    The canonical value is the fraction ``n``: 0.0 is clean and 1.0 is the
    strongest realistic distortion. Values above 1.0 are accepted for harsher
    sweeps but fall off the 11-class labeling grid.
    """

    n: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.n) and self.n >= 0.0):
            raise ValueError(f"noise fraction must be finite and >= 0, got {self.n!r}")

    @classmethod
    def from_percent(cls, percent: float) -> "NoiseLevel":
        return cls(percent / 100.0)

    @classmethod
    def from_class(cls, index: int) -> "NoiseLevel":
        """Level for one of the 11 grid classes (0 -> 0%, ..., 10 -> 100%)."""
        if not 0 <= index <= 10:
            raise ValueError(f"level class must be in 0..10, got {index}")
        return cls(index / 10.0)

    def percent(self) -> float:
        return 100.0 * self.n

    def class_index(self) -> int:
        """Grid class 0..10; defined only when ``n`` sits on the 0.1 grid."""
        index = round(self.n * 10.0)
        if not 0 <= index <= 10 or abs(self.n * 10.0 - index) > 1e-9:
            raise ValueError(f"{self.n} is not on the 0.1 level grid")
        return int(index)


def snr_scale(level: NoiseLevel) -> float:
    """Linear SNR multiplier for a noise level.

    A 100% level decreases the SNR by 10 dB, i.e. multiplies it by 0.1;
    a 0% level leaves it unchanged.
    """
    return 10.0 ** (-level.n)


def accuracy_scale(level: NoiseLevel) -> float:
    """Growth factor of measurement uncertainty: 1/sqrt of the SNR multiplier."""
    return 10.0 ** (level.n / 2.0)


def to_polar(x: float, y: float) -> tuple[float, float]:
    """Sensor-frame (x, y) meters to (range m, azimuth deg off boresight)."""
    if x == 0.0 and y == 0.0:
        raise ValueError("azimuth is undefined at the sensor origin")
    return math.hypot(x, y), math.degrees(math.atan2(y, x))


def from_polar(r: float, theta_deg: float) -> tuple[float, float]:
    """(range m, azimuth deg) back to sensor-frame Cartesian meters."""
    t = math.radians(theta_deg)
    return r * math.cos(t), r * math.sin(t)


@dataclass(frozen=True)
class RadarPoint:
    """One radar return in the sensor frame (x forward, y left, z up).

    Field order matches the on-disk record layout; the trailing small-integer
    fields are sensor status and uncertainty codes passed through untouched
    unless an operation says otherwise.
    """

    x: float
    y: float
    z: float = 0.0
    dyn_prop: int = 0
    id: int = 0
    rcs: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    vx_comp: float = 0.0
    vy_comp: float = 0.0
    is_quality_valid: int = 1
    ambig_state: int = 3
    x_rms: int = 0
    y_rms: int = 0
    invalid_state: int = 0
    pdh0: int = 1
    vx_rms: int = 0
    vy_rms: int = 0

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        """Azimuth in degrees off boresight."""
        return math.degrees(math.atan2(self.y, self.x))

    @property
    def rcs_linear(self) -> float:
        """Cross section in linear m^2 (the stored value is dBsm)."""
        return 10.0 ** (self.rcs / 10.0)


@dataclass(frozen=True)
class RadarFrame:
    """One radar sweep: an ordered point collection plus optional ego velocity."""

    points: tuple[RadarPoint, ...]
    ego_velocity: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if self.ego_velocity is not None:
            vx, vy = self.ego_velocity
            object.__setattr__(self, "ego_velocity", (float(vx), float(vy)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @cached_property
    def r_max_frame(self) -> float:
        """Range of the farthest point in the sweep."""
        if not self.points:
            raise ValueError("empty frame has no farthest point")
        return max(p.r for p in self.points)

    @cached_property
    def beta_min(self) -> float:
        """Frame detection threshold: the minimum of linear RCS over range^4."""
        if not self.points:
            raise ValueError("empty frame has no detection threshold")
        rcs_lin = np.array([p.rcs_linear for p in self.points])
        r4 = np.array([p.r for p in self.points]) ** 4
        return float(np.min(rcs_lin / r4))

    @cached_property
    def rcs_sorted(self) -> tuple[float, ...]:
        return tuple(sorted(p.rcs for p in self.points))

    @cached_property
    def rcs_linear_max(self) -> float:
        if not self.points:
            raise ValueError("empty frame has no RCS distribution")
        return 10.0 ** (self.rcs_sorted[-1] / 10.0)


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """H x W x 3 array of 8-bit intensities, row-major, channel-interleaved."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.dtype != np.uint8:
            raise ValueError(f"image data must be uint8, got {arr.dtype}")
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"image data must be HxWx3, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return 3

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ImageBuffer":
        """Wrap an array, promoting a 2-D grayscale map to three equal channels."""
        arr = np.asarray(arr)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        return cls(np.ascontiguousarray(arr))


@dataclass(frozen=True)
class SensorModel:
    """Radar physical configuration.

    ``fov_brackets`` lists (range upper bound m, azimuth half-angle deg) rows
    in ascending range order; a query range falls into the first bracket whose
    upper bound exceeds it. Accuracy values are the manufacturer's range,
    angle, and velocity specs at nominal conditions.
    """

    r_min: float = 0.2
    r_abs_max: float = 250.0
    ghost_margin: float = 10.0
    ghost_count_max: int = 4
    fov_brackets: tuple[tuple[float, float], ...] = (
        (10.0, 60.0),
        (100.0, 45.0),
        (math.inf, 9.0),
    )
    acc_r: float = 0.1
    acc_theta: float = 0.1
    acc_v: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.r_min < self.r_abs_max:
            raise ValueError("require 0 < r_min < r_abs_max")
        if self.ghost_margin < 0.0:
            raise ValueError("ghost_margin must be >= 0")
        if self.ghost_count_max < 0:
            raise ValueError("ghost_count_max must be >= 0")
        brackets = tuple((float(u), float(h)) for u, h in self.fov_brackets)
        if not brackets:
            raise ValueError("at least one FOV bracket required")
        uppers = [u for u, _ in brackets]
        if sorted(uppers) != uppers or len(set(uppers)) != len(uppers):
            raise ValueError("FOV brackets must have strictly ascending upper bounds")
        for _, half in brackets:
            if not 0.0 < half <= 90.0:
                raise ValueError("FOV half-angles must lie in (0, 90] degrees")
        object.__setattr__(self, "fov_brackets", brackets)
        for name in ("acc_r", "acc_theta", "acc_v"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RngStream:
    """Deterministic hierarchical random streams.

    A stream is identified by (master seed, key path). Substreams derive from
    a stable digest of the path, so the draws a given (frame, stage) sees do
    not depend on process count, thread scheduling, or arrival order.
    """

    master_seed: int
    path: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "path", tuple(self.path))

    def child(self, *keys) -> "RngStream":
        return RngStream(self.master_seed, self.path + keys)

    def _digest(self) -> int:
        h = hashlib.sha256()
        h.update(self.master_seed.to_bytes(8, "little"))
        for key in self.path:
            h.update(b"\x1f")
            h.update(repr(key).encode("utf-8"))
        return int.from_bytes(h.digest()[:16], "little")

    def generator(self) -> np.random.Generator:
        """Fresh generator for this stream; the i-th draw is reproducible."""
        return np.random.Generator(np.random.PCG64(self._digest()))
