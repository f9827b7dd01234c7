"""Seedable sensor failure synthesis for camera images and radar sweeps."""

from .core import (
    ImageBuffer,
    NoiseLevel,
    RadarFrame,
    RadarPoint,
    RngStream,
    SensorModel,
    accuracy_scale,
    from_polar,
    snr_scale,
    to_polar,
)
from .camera import (
    CameraNoiseKind,
    ExposureDirection,
    Kernel2D,
    apply_additive_noise,
    apply_blur,
    apply_exposure,
    blur_kernel_size,
    degrade_image,
    exposure_kernel,
    gaussian_kernel,
)
from .radar import (
    DegradeReport,
    GhostStateTable,
    RadarNoiseConfig,
    apply_false_negatives,
    apply_measurement_noise,
    azimuth_bounds,
    degrade_frame,
    detection_coefficient,
    estimate_ego_velocity,
    generate_ghost_points,
    per_point_accuracy,
)
from .pcd import PcdDataModeError, PcdError, PcdFile, PcdSchemaError, PcdTruncatedError, read_pcd, write_pcd
from .dataset import ManifestRecord, generate_dataset, read_image, read_manifest, write_image
from .validation import ValidationReport, default_validation_report, render_bev

__version__ = "0.1.0"
