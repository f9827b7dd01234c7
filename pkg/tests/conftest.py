import math

import numpy as np
import pytest

from sensornoise.core import ImageBuffer, RadarFrame, RadarPoint, RngStream


@pytest.fixture
def rng():
    return RngStream(1234)


def make_point(x, y, rcs=0.0, **kwargs):
    return RadarPoint(x=x, y=y, rcs=rcs, **kwargs)


def random_frame(seed: int, n_points: int = 60, r_lo=2.0, r_hi=200.0,
                 rcs_lo=-15.0, rcs_hi=30.0, ego_velocity=None) -> RadarFrame:
    """Arbitrary plausible frame, generated outside the package's own streams."""
    gen = np.random.Generator(np.random.PCG64(seed))
    points = []
    for i in range(n_points):
        r = float(gen.uniform(r_lo, r_hi))
        theta = float(gen.uniform(-60.0, 60.0))
        x = r * math.cos(math.radians(theta))
        y = r * math.sin(math.radians(theta))
        points.append(
            RadarPoint(
                x=x, y=y, rcs=float(gen.uniform(rcs_lo, rcs_hi)),
                dyn_prop=int(gen.integers(0, 2)), id=i,
                vx=float(gen.uniform(-15.0, 15.0)), vy=float(gen.uniform(-5.0, 5.0)),
                x_rms=int(gen.integers(0, 10)), y_rms=int(gen.integers(0, 10)),
                pdh0=int(gen.integers(0, 4)),
                vx_rms=int(gen.integers(0, 10)), vy_rms=int(gen.integers(0, 10)),
            )
        )
    return RadarFrame(points=tuple(points), ego_velocity=ego_velocity)


def gray_image(value: int, height: int = 16, width: int = 16) -> ImageBuffer:
    return ImageBuffer(np.full((height, width, 3), value, dtype=np.uint8))


def random_image(seed: int, height: int = 8, width: int = 8) -> ImageBuffer:
    gen = np.random.Generator(np.random.PCG64(seed))
    return ImageBuffer(gen.integers(0, 256, size=(height, width, 3), dtype=np.uint8))
