"""Statistical checks tying the synthesizers to their scaling contracts.

Each check is deterministic given (master stream, trial count) and reports an
expected value, a measured value, and a tolerance. The module also renders
bird-eye-view rasters and side-by-side degradation strips for visual review.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .camera import CameraNoiseKind, additive_noise_map, degrade_image
from .core import (
    ImageBuffer,
    NoiseLevel,
    RadarFrame,
    RadarPoint,
    RngStream,
    SensorModel,
)
from .radar import (
    DEFAULT_CONFIG,
    RadarNoiseConfig,
    apply_false_negatives,
    apply_measurement_noise,
    degrade_frame,
)

__all__ = [
    "CheckResult",
    "ValidationReport",
    "check_camera_noise_std",
    "check_dropout_monotonicity",
    "check_shift_scaling",
    "default_validation_report",
    "dropout_fixture_frame",
    "shift_fixture",
    "render_bev",
    "camera_strip",
    "bev_strip",
]


@dataclass
class CheckResult:
    name: str
    expected: float
    measured: float
    tolerance: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"[{status}] {self.name}: expected {self.expected:.6g}, "
            f"measured {self.measured:.6g}, tolerance {self.tolerance:.3g}"
        )
        if self.note:
            text += f" ({self.note})"
        return text


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return "\n".join(lines)


def check_camera_noise_std(
    level: NoiseLevel, trials: int, rng: RngStream, tolerance: float = 0.03
) -> CheckResult:
    """Empirical std of the additive-noise generator against one unit per percent.

    Measured on the raw noise map, before quantization and clamping can bias
    the distribution tails.
    """
    if trials < 65536:
        raise ValueError("camera noise std check needs at least 65536 trials")
    noise = additive_noise_map((trials,), level, rng.child("camera_std", level.n))
    measured = float(np.std(noise))
    expected = level.percent()
    if expected == 0.0:
        passed = measured == 0.0
    else:
        passed = abs(measured - expected) <= tolerance * expected
    return CheckResult(
        name=f"camera additive noise std @ n={level.n:g}",
        expected=expected,
        measured=measured,
        tolerance=tolerance,
        passed=passed,
        note=f"{trials} samples",
    )


def check_dropout_monotonicity(
    frame: RadarFrame,
    levels,
    seeds: int,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
) -> CheckResult:
    """Mean dropped-point count must be non-decreasing across levels.

    Individual seeds can invert the order, so the comparison is on per-level
    means. Field reference, not asserted: on real sweeps a small level loses
    under ten points while a full 10 dB drop can cut past sixty.
    """
    if seeds < 200:
        raise ValueError("dropout monotonicity check needs at least 200 seeds per level")
    means = []
    for i, level in enumerate(levels):
        total = 0
        for s in range(seeds):
            _, dropped = apply_false_negatives(
                frame, level, rng.child("dropout_check", i, s), config
            )
            total += len(dropped)
        means.append(total / seeds)
    violations = sum(1 for a, b in zip(means, means[1:]) if b < a)
    return CheckResult(
        name="dropout mean monotone in level",
        expected=0.0,
        measured=float(violations),
        tolerance=0.0,
        passed=violations == 0,
        note="means " + ", ".join(f"{m:.2f}" for m in means),
    )


def check_shift_scaling(
    point: RadarPoint,
    frame: RadarFrame,
    levels: tuple[NoiseLevel, NoiseLevel],
    trials: int,
    rng: RngStream,
    model: SensorModel = SensorModel(),
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    tolerance: float = 0.05,
) -> list[CheckResult]:
    """Shift std ratios between two levels against the 1/sqrt(SNR) law."""
    if trials < 10**5:
        raise ValueError("shift scaling check needs at least 1e5 trials")
    index = frame.points.index(point)
    r0, t0 = point.r, point.theta
    v0 = math.hypot(point.vx, point.vy)
    stds = []
    for li, level in enumerate(levels):
        dr = np.empty(trials)
        dt = np.empty(trials)
        dv = np.empty(trials)
        for t in range(trials):
            out = apply_measurement_noise(
                frame, model, level, rng.child("shift_check", li, t), config
            )
            q = out.points[index]
            dr[t] = q.r - r0
            dt[t] = q.theta - t0
            dv[t] = math.hypot(q.vx, q.vy) - v0
        stds.append((np.std(dr), np.std(dt), np.std(dv)))
    expected = 10.0 ** ((levels[1].n - levels[0].n) / 2.0)
    results = []
    for name, a, b in zip(("range", "azimuth", "speed"), stds[0], stds[1]):
        ratio = float(b / a)
        results.append(
            CheckResult(
                name=f"shift std ratio ({name}) n={levels[0].n:g}->{levels[1].n:g}",
                expected=expected,
                measured=ratio,
                tolerance=tolerance,
                passed=abs(ratio - expected) <= tolerance * expected,
                note=f"{trials} trials per level",
            )
        )
    return results


def dropout_fixture_frame(n_points: int = 100) -> RadarFrame:
    """Synthetic frame whose detectability ratios spread log-uniformly over a decade.

    With that spread the expected drop count rises steadily as the level grows,
    which keeps the monotonicity check well away from sampling noise.
    """
    points = []
    for i in range(n_points):
        ratio = 10.0 ** (i / (n_points - 1))
        r = 10.0 + 80.0 * (i % 17) / 16.0
        base = 1e-7  # detectability floor sigma_lin / r^4 of the weakest point
        rcs = 10.0 * math.log10(ratio * base * r**4)
        theta = -40.0 + 80.0 * (i % 11) / 10.0
        x, y = r * math.cos(math.radians(theta)), r * math.sin(math.radians(theta))
        points.append(
            RadarPoint(x=x, y=y, rcs=rcs, dyn_prop=1, id=i, vx=-5.0, vy=0.0)
        )
    return RadarFrame(points=tuple(points))


def shift_fixture() -> tuple[RadarPoint, RadarFrame]:
    """Single strongest-reflector point for accuracy scaling measurements."""
    point = RadarPoint(x=46.985, y=12.5, rcs=12.0, dyn_prop=0, id=0, vx=6.0, vy=2.0)
    return point, RadarFrame(points=(point,), ego_velocity=(5.0, 0.0))


def default_validation_report(
    master_seed: int = 0,
    quick: bool = False,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
) -> ValidationReport:
    """Standard check suite over the synthesizers' statistical contracts."""
    rng = RngStream(master_seed)
    report = ValidationReport()
    trials = 65536
    for n in (0.25, 0.5, 1.0):
        report.checks.append(check_camera_noise_std(NoiseLevel(n), trials, rng))
    frame = dropout_fixture_frame()
    levels = [NoiseLevel(v / 10.0) for v in range(0, 11, 2)]
    report.checks.append(
        check_dropout_monotonicity(frame, levels, 200, rng, config)
    )
    point, sframe = shift_fixture()
    shift_trials = 10**4 if quick else 10**5
    tolerance = 0.10 if quick else 0.05
    if quick:
        # Quick mode trades trial count for speed; the full contract runs in CI.
        results = _quick_shift_scaling(point, sframe, rng, config, shift_trials, tolerance)
    else:
        results = check_shift_scaling(
            point, sframe, (NoiseLevel(0.0), NoiseLevel(1.0)), shift_trials, rng,
            config=config, tolerance=tolerance,
        )
    report.checks.extend(results)
    return report


def _quick_shift_scaling(point, frame, rng, config, trials, tolerance):
    model = SensorModel()
    levels = (NoiseLevel(0.0), NoiseLevel(1.0))
    index = frame.points.index(point)
    r0, t0 = point.r, point.theta
    v0 = math.hypot(point.vx, point.vy)
    stds = []
    for li, level in enumerate(levels):
        dr, dt, dv = np.empty(trials), np.empty(trials), np.empty(trials)
        for t in range(trials):
            out = apply_measurement_noise(
                frame, model, level, rng.child("shift_quick", li, t), config
            )
            q = out.points[index]
            dr[t] = q.r - r0
            dt[t] = q.theta - t0
            dv[t] = math.hypot(q.vx, q.vy) - v0
        stds.append((np.std(dr), np.std(dt), np.std(dv)))
    expected = 10.0 ** ((levels[1].n - levels[0].n) / 2.0)
    out = []
    for name, a, b in zip(("range", "azimuth", "speed"), stds[0], stds[1]):
        ratio = float(b / a)
        out.append(
            CheckResult(
                name=f"shift std ratio ({name}) quick",
                expected=expected,
                measured=ratio,
                tolerance=tolerance,
                passed=abs(ratio - expected) <= tolerance * expected,
                note=f"{trials} trials per level",
            )
        )
    return out


def render_bev(
    frame: RadarFrame,
    bounds: tuple[float, float, float, float] = (0.0, 120.0, -60.0, 60.0),
    resolution: tuple[int, int] = (400, 400),
    marker: int = 1,
) -> ImageBuffer:
    """Top-down raster of a frame; pixel intensity encodes RCS rank.

    ``bounds`` is (x_min, x_max, y_min, y_max) meters with x forward mapped
    up and positive y (left) mapped to the left half. The raster is a pure
    function of the frame, so identical frames render identical bytes.
    """
    x_min, x_max, y_min, y_max = bounds
    width, height = resolution
    raster = np.zeros((height, width, 3), dtype=np.uint8)
    if not frame.points:
        return ImageBuffer(raster)
    rcs = np.array([p.rcs for p in frame.points])
    lo, hi = float(rcs.min()), float(rcs.max())
    span = hi - lo
    for p in frame.points:
        if not (x_min <= p.x <= x_max and y_min <= p.y <= y_max):
            continue
        row = int(round((x_max - p.x) / (x_max - x_min) * (height - 1)))
        col = int(round((y_max - p.y) / (y_max - y_min) * (width - 1)))
        shade = 255 if span == 0.0 else int(round(80 + 175 * (p.rcs - lo) / span))
        r0, r1 = max(0, row - marker + 1), min(height, row + marker)
        c0, c1 = max(0, col - marker + 1), min(width, col + marker)
        raster[r0:r1, c0:c1, :] = np.maximum(raster[r0:r1, c0:c1, :], shade)
    return ImageBuffer(raster)


def _hstack_with_separator(panels: list[np.ndarray], gap: int = 2) -> np.ndarray:
    height = panels[0].shape[0]
    sep = np.full((height, gap, 3), 255, dtype=np.uint8)
    parts = []
    for i, panel in enumerate(panels):
        if i:
            parts.append(sep)
        parts.append(panel)
    return np.concatenate(parts, axis=1)


def camera_strip(
    img: ImageBuffer,
    kind: CameraNoiseKind,
    levels,
    rng: RngStream,
) -> ImageBuffer:
    """Side-by-side panels of one degradation kind across levels."""
    panels = [
        degrade_image(img, kind, level, rng.child("strip", kind.value, level.n)).data
        for level in levels
    ]
    return ImageBuffer(_hstack_with_separator(panels))


def bev_strip(
    frame: RadarFrame,
    model: SensorModel,
    levels,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    bounds: tuple[float, float, float, float] = (0.0, 120.0, -60.0, 60.0),
    resolution: tuple[int, int] = (300, 300),
) -> ImageBuffer:
    """Side-by-side BEV panels of the degraded frame across levels."""
    panels = []
    for level in levels:
        degraded, _ = degrade_frame(frame, model, level, rng.child("bev", level.n), config)
        panels.append(render_bev(degraded, bounds, resolution).data)
    return ImageBuffer(_hstack_with_separator(panels))
