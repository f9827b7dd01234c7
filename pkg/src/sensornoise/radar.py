"""Radar degradation pipeline: ghost returns, threshold dropouts, measurement shifts.

The three stages run in order on a frame. Ghosts are treated as physical
echoes, so they are appended before the dropout and shift stages and are
subject to both. All stages are pure given the frame, config, and stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    NoiseLevel,
    RadarFrame,
    RadarPoint,
    RngStream,
    SensorModel,
    accuracy_scale,
    from_polar,
    snr_scale,
)

__all__ = [
    "GhostStateTable",
    "RadarNoiseConfig",
    "ShiftRecord",
    "DegradeReport",
    "estimate_ego_velocity",
    "azimuth_bounds",
    "generate_ghost_points",
    "detection_coefficient",
    "apply_false_negatives",
    "per_point_accuracy",
    "apply_measurement_noise",
    "degrade_frame",
]


@dataclass(frozen=True)
class GhostStateTable:
    """invalid_state codes a synthesized ghost may carry.

    One entry per plausible sensor self-diagnosis of a bogus return; the code
    mapping is configurable to track other firmware revisions.
    """

    codes: tuple[tuple[str, int], ...] = (
        ("low_rcs", 0x04),
        ("high_child_prob", 0x09),
        ("artifact_50deg", 0x0A),
        ("artifact_prob", 0x0C),
        ("no_local_max", 0x0B),
    )

    def __post_init__(self) -> None:
        codes = tuple((str(name), int(code)) for name, code in self.codes)
        if len(codes) != 5:
            raise ValueError("exactly five ghost point states are required")
        values = [code for _, code in codes]
        if len(set(values)) != len(values):
            raise ValueError("ghost state codes must be distinct")
        object.__setattr__(self, "codes", codes)

    @property
    def code_values(self) -> tuple[int, ...]:
        return tuple(code for _, code in self.codes)


@dataclass(frozen=True)
class RadarNoiseConfig:
    """Tuning knobs and test hooks for the degradation stages."""

    state_table: GhostStateTable = GhostStateTable()
    ghost_pdh0: int = 7
    stationary_dyn_props: frozenset = frozenset({1})
    disable_threshold_noise: bool = False
    skip_shift_at_zero: bool = False
    rescale_rms: bool = False
    sigma_ref_linear: float | None = None


DEFAULT_CONFIG = RadarNoiseConfig()


@dataclass
class ShiftRecord:
    """Applied per-point deltas: range m, azimuth deg, speed m/s."""

    dr: float
    dtheta: float
    dv: float


@dataclass
class DegradeReport:
    """Book-keeping for one degraded frame."""

    n_input: int = 0
    n_ghosts_added: int = 0
    n_points_dropped: int = 0
    n_output: int = 0
    shifts: list = field(default_factory=list)
    ego_fallback: bool = False

    def counts_consistent(self) -> bool:
        return self.n_output == self.n_input + self.n_ghosts_added - self.n_points_dropped


def estimate_ego_velocity(
    frame: RadarFrame,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    report: DegradeReport | None = None,
) -> np.ndarray:
    """Ego velocity (m/s) from metadata, else from the static-world returns.

    Stationary targets move at minus the ego velocity in the sensor frame, so
    the negated component-wise median of their relative velocities estimates
    it. With no stationary returns the estimate degrades to zero and the
    report, when given, is flagged.
    """
    if frame.ego_velocity is not None:
        return np.array(frame.ego_velocity, dtype=np.float64)
    stationary = [p for p in frame.points if p.dyn_prop in config.stationary_dyn_props]
    if not stationary:
        if report is not None:
            report.ego_fallback = True
        return np.zeros(2)
    med_vx = float(np.median([p.vx for p in stationary]))
    med_vy = float(np.median([p.vy for p in stationary]))
    return np.array([-med_vx, -med_vy])


def azimuth_bounds(r: float, model: SensorModel) -> tuple[float, float]:
    """Symmetric azimuth limits (deg) of the FOV bracket covering range ``r``."""
    if r < 0.0:
        raise ValueError("range must be >= 0")
    for upper, half in model.fov_brackets:
        if upper > r:
            return -half, half
    half = model.fov_brackets[-1][1]
    return -half, half


def _compensated_velocity(
    vx: float, vy: float, ux: float, uy: float, ego_speed: float
) -> tuple[float, float]:
    """Compensated radial velocity along the line of sight (ux, uy).

    The relative velocity is projected on the line of sight and the ego speed
    is subtracted from the resulting magnitude, keeping the radial direction.
    A zero projection falls back to the outward line-of-sight direction.
    """
    s = vx * ux + vy * uy
    if s >= 0.0:
        dx, dy = ux, uy
    else:
        dx, dy = -ux, -uy
    mag = abs(s) - ego_speed
    return mag * dx, mag * dy


def generate_ghost_points(
    frame: RadarFrame,
    model: SensorModel,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    report: DegradeReport | None = None,
) -> list[RadarPoint]:
    """Synthesize multipath false positives for one frame.

    The count is uniform on {0..ghost_count_max}. Each ghost lands uniformly
    in range between the sensor minimum and the frame's farthest return plus
    a margin (capped at the absolute maximum range), uniformly in azimuth
    within the FOV bracket of its range. Velocity is copied from a random
    existing return; the compensated radial velocity is rebuilt from its
    line-of-sight projection and the ego speed. RCS is drawn from the frame's
    own distribution through a half-Gaussian rank map that favors low values.
    """
    if not frame.points:
        if report is not None:
            report.n_ghosts_added = 0
        return []
    gen = rng.child("ghosts").generator()
    count = int(gen.integers(0, model.ghost_count_max + 1))
    ego_speed = float(np.linalg.norm(estimate_ego_velocity(frame, config, report)))
    r_hi = min(frame.r_max_frame + model.ghost_margin, model.r_abs_max)
    rcs_sorted = frame.rcs_sorted
    n = len(frame.points)
    max_id = max(p.id for p in frame.points)
    state_codes = config.state_table.code_values
    ghosts: list[RadarPoint] = []
    for k in range(count):
        r = float(gen.uniform(model.r_min, r_hi))
        lo, hi = azimuth_bounds(r, model)
        theta = float(gen.uniform(lo, hi))
        x, y = from_polar(r, theta)
        donor = frame.points[int(gen.integers(0, n))]
        ux, uy = x / r, y / r
        vx_comp, vy_comp = _compensated_velocity(donor.vx, donor.vy, ux, uy, ego_speed)
        rank = min(abs(float(gen.normal(0.0, 1.0 / 3.0))), 1.0 - 1e-9)
        rcs = rcs_sorted[int(rank * n)]
        invalid_state = int(state_codes[int(gen.integers(0, len(state_codes)))])
        ghosts.append(
            RadarPoint(
                x=x,
                y=y,
                z=0.0,
                dyn_prop=donor.dyn_prop,
                id=max_id + 1 + k,
                rcs=rcs,
                vx=donor.vx,
                vy=donor.vy,
                vx_comp=vx_comp,
                vy_comp=vy_comp,
                is_quality_valid=donor.is_quality_valid,
                ambig_state=donor.ambig_state,
                x_rms=donor.x_rms,
                y_rms=donor.y_rms,
                invalid_state=invalid_state,
                pdh0=config.ghost_pdh0,
                vx_rms=donor.vx_rms,
                vy_rms=donor.vy_rms,
            )
        )
    if report is not None:
        report.n_ghosts_added = count
    return ghosts


def _base_coefficients(frame: RadarFrame, level: NoiseLevel) -> np.ndarray:
    rcs_lin = np.array([p.rcs_linear for p in frame.points])
    r4 = np.array([p.r for p in frame.points]) ** 4
    return rcs_lin / r4 * snr_scale(level)


def detection_coefficient(
    point: RadarPoint,
    frame: RadarFrame,
    level: NoiseLevel,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
) -> float:
    """Detectability of one return: scaled linear RCS over range^4 plus jitter.

    The jitter is Gaussian with std equal to the frame detection threshold
    and models physical uncertainty; ``config.disable_threshold_noise``
    silences it for exact comparisons.
    """
    if point.r <= 0.0:
        raise ValueError("detection coefficient requires a positive range")
    base = point.rcs_linear / point.r**4 * snr_scale(level)
    if config.disable_threshold_noise:
        return base
    gen = rng.child("dropout").generator()
    return base + float(gen.normal(0.0, frame.beta_min))


def apply_false_negatives(
    frame: RadarFrame,
    level: NoiseLevel,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    report: DegradeReport | None = None,
) -> tuple[RadarFrame, list[int]]:
    """Drop every return whose detection coefficient sinks below the threshold.

    The threshold is the frame minimum of linear RCS over range^4, computed
    once on the incoming frame and held fixed for the pass. Removal is strict,
    so with jitter disabled and a 0% level nothing is ever dropped. Survivor
    order is preserved.
    """
    if not frame.points:
        if report is not None:
            report.n_points_dropped = 0
        return frame, []
    beta = frame.beta_min
    alpha = _base_coefficients(frame, level)
    if not config.disable_threshold_noise:
        gen = rng.child("dropout").generator()
        alpha = alpha + gen.normal(0.0, beta, size=len(frame.points))
    keep = alpha >= beta
    dropped = [i for i, k in enumerate(keep) if not k]
    survivors = tuple(p for p, k in zip(frame.points, keep) if k)
    if report is not None:
        report.n_points_dropped = len(dropped)
    return replace(frame, points=survivors), dropped


def per_point_accuracy(
    point: RadarPoint,
    frame: RadarFrame,
    model: SensorModel,
    level: NoiseLevel,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
) -> tuple[float, float, float]:
    """Effective (range m, angle deg, speed m/s) accuracy for one return.

    Manufacturer specs hold for the strongest reflector, so each component is
    scaled by sqrt of the reference-to-point linear RCS ratio, then by the
    level-dependent uncertainty growth. The reference is the frame's maximum
    linear RCS unless an absolute one is configured.
    """
    sigma_ref = config.sigma_ref_linear
    if sigma_ref is None:
        sigma_ref = frame.rcs_linear_max
    factor = math.sqrt(sigma_ref / point.rcs_linear) * accuracy_scale(level)
    return model.acc_r * factor, model.acc_theta * factor, model.acc_v * factor


def _rescale_rms(code: int, scale: float) -> int:
    return int(min(127, max(0, math.floor(code * scale + 0.5))))


def apply_measurement_noise(
    frame: RadarFrame,
    model: SensorModel,
    level: NoiseLevel,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
    report: DegradeReport | None = None,
) -> RadarFrame:
    """Perturb each return's range, azimuth, and speed by its accuracy draws.

    Ranges are clamped at the sensor minimum after the shift. Speed noise is
    applied to the velocity magnitude with the direction kept (zero-velocity
    returns get it along the line of sight). The compensated radial velocity
    is rebuilt from the noisy velocity and line of sight. Integer status and
    rms fields pass through unchanged unless ``config.rescale_rms`` grows the
    rms codes with the accuracy scale.
    """
    if not frame.points:
        return frame
    if config.skip_shift_at_zero and level.n == 0.0:
        return frame
    gen = rng.child("shift").generator()
    ego_speed = float(np.linalg.norm(estimate_ego_velocity(frame, config, report)))
    n = len(frame.points)
    accs = np.array(
        [per_point_accuracy(p, frame, model, level, config) for p in frame.points]
    )
    w_r = gen.normal(0.0, accs[:, 0])
    w_t = gen.normal(0.0, accs[:, 1])
    w_v = gen.normal(0.0, accs[:, 2])
    rms_scale = accuracy_scale(level)
    new_points = []
    for i in range(n):
        p = frame.points[i]
        r0, t0 = p.r, p.theta
        r1 = max(r0 + float(w_r[i]), model.r_min)
        t1 = t0 + float(w_t[i])
        x1, y1 = from_polar(r1, t1)
        ux1, uy1 = x1 / r1, y1 / r1
        speed0 = math.hypot(p.vx, p.vy)
        if speed0 > 0.0:
            s1 = speed0 + float(w_v[i])
            vx1, vy1 = s1 * p.vx / speed0, s1 * p.vy / speed0
        else:
            vx1, vy1 = float(w_v[i]) * ux1, float(w_v[i]) * uy1
        vx_comp, vy_comp = _compensated_velocity(vx1, vy1, ux1, uy1, ego_speed)
        updates = dict(
            x=x1, y=y1, vx=vx1, vy=vy1, vx_comp=vx_comp, vy_comp=vy_comp
        )
        if config.rescale_rms:
            updates.update(
                x_rms=_rescale_rms(p.x_rms, rms_scale),
                y_rms=_rescale_rms(p.y_rms, rms_scale),
                vx_rms=_rescale_rms(p.vx_rms, rms_scale),
                vy_rms=_rescale_rms(p.vy_rms, rms_scale),
            )
        new_points.append(replace(p, **updates))
        if report is not None:
            report.shifts.append(
                ShiftRecord(
                    dr=r1 - r0,
                    dtheta=float(w_t[i]),
                    dv=math.hypot(vx1, vy1) - speed0,
                )
            )
    return replace(frame, points=tuple(new_points))


def degrade_frame(
    frame: RadarFrame,
    model: SensorModel,
    level: NoiseLevel,
    rng: RngStream,
    config: RadarNoiseConfig = DEFAULT_CONFIG,
) -> tuple[RadarFrame, DegradeReport]:
    """Full degradation: ghosts in, weak returns out, survivors shifted."""
    report = DegradeReport(n_input=len(frame.points))
    ghosts = generate_ghost_points(frame, model, rng, config, report)
    union = replace(frame, points=frame.points + tuple(ghosts))
    survivors, _ = apply_false_negatives(union, level, rng, config, report)
    shifted = apply_measurement_noise(survivors, model, level, rng, config, report)
    report.n_output = len(shifted.points)
    if not report.counts_consistent():
        raise AssertionError("degrade report count invariant violated")
    return shifted, report
