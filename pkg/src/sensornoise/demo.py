"""Deterministic synthetic street scene for demos, tests, and toy training.

Real drive data cannot ship with the repository, so these generators produce
plausible stand-ins: a forward camera view and a radar sweep of the same kind
of scene, fully determined by their seeds.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .core import ImageBuffer, RadarFrame, RadarPoint
from .dataset import write_image
from .pcd import PcdFile, write_pcd

__all__ = ["demo_image", "demo_frame", "write_demo_tree"]


def demo_image(width: int = 320, height: int = 180, seed: int = 0) -> ImageBuffer:
    """Synthetic road scene: sky gradient, road, lane dashes, a few vehicles."""
    gen = np.random.Generator(np.random.PCG64(seed))
    img = np.zeros((height, width, 3), dtype=np.float64)
    horizon = int(height * 0.45)

    rows = np.arange(height)[:, None]
    sky = np.clip(120 + 110 * (horizon - rows) / max(horizon, 1), 0, 235)
    img[:horizon, :, 0] = sky[:horizon] * 0.75
    img[:horizon, :, 1] = sky[:horizon] * 0.85
    img[:horizon, :, 2] = sky[:horizon]

    img[horizon:, :, :] = 78.0  # asphalt
    shoulder = np.clip(60 + 35 * (rows[horizon:] - horizon) / max(height - horizon, 1), 0, 255)
    for col in range(width):
        off = abs(col - width / 2) / (width / 2)
        if off > 0.82:
            img[horizon:, col, 0] = shoulder[:, 0] * 0.9
            img[horizon:, col, 1] = shoulder[:, 0]
            img[horizon:, col, 2] = shoulder[:, 0] * 0.6

    for r in range(horizon, height, 8):
        if (r // 8) % 2 == 0:
            half = max(1, (r - horizon) // 14)
            c = width // 2
            img[r : r + 4, c - half : c + half, :] = 225.0

    n_cars = 3
    for i in range(n_cars):
        cw = int(gen.integers(width // 10, width // 4))
        ch = int(cw * 0.6)
        cx = int(gen.integers(cw, width - cw))
        cy = int(gen.integers(horizon, max(horizon + 1, height - ch)))
        color = gen.integers(40, 220, size=3).astype(np.float64)
        img[cy : cy + ch, cx : cx + cw, :] = color
        img[cy : cy + max(1, ch // 4), cx : cx + cw, :] = color * 0.55  # roof line

    img += gen.normal(0.0, 2.5, size=img.shape)  # mild sensor texture
    return ImageBuffer(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


def demo_frame(n_points: int = 120, seed: int = 0, ego_speed: float = 6.0) -> RadarFrame:
    """Synthetic radar sweep: guardrails, poles, and a few moving vehicles."""
    gen = np.random.Generator(np.random.PCG64(seed))
    points = []
    idx = 0

    def compensated(vx, vy, x, y):
        # Over-ground radial velocity of the target, projected on the sight line.
        r = math.hypot(x, y)
        ux, uy = x / r, y / r
        s = (vx + ego_speed) * ux + vy * uy
        return s * ux, s * uy

    n_static = int(n_points * 0.7)
    for _ in range(n_static):
        side = 1.0 if gen.random() < 0.5 else -1.0
        x = float(gen.uniform(4.0, 105.0))
        y = side * float(gen.uniform(6.0, 10.0)) + float(gen.normal(0.0, 0.4))
        rcs = float(gen.uniform(-6.0, 12.0))
        vx, vy = -ego_speed, 0.0
        cx, cy = compensated(vx, vy, x, y)
        points.append(
            RadarPoint(
                x=x, y=y, dyn_prop=1, id=idx, rcs=rcs, vx=vx, vy=vy,
                vx_comp=cx, vy_comp=cy,
                x_rms=int(gen.integers(0, 8)), y_rms=int(gen.integers(0, 8)),
                pdh0=int(gen.integers(0, 3)),
                vx_rms=int(gen.integers(0, 8)), vy_rms=int(gen.integers(0, 8)),
            )
        )
        idx += 1

    for _ in range(n_points - n_static):
        x = float(gen.uniform(8.0, 90.0))
        y = float(gen.uniform(-7.0, 7.0))
        rcs = float(gen.uniform(5.0, 25.0))
        speed = float(gen.uniform(-4.0, 10.0))
        vx, vy = speed - ego_speed, float(gen.normal(0.0, 0.3))
        cx, cy = compensated(vx, vy, x, y)
        points.append(
            RadarPoint(
                x=x, y=y, dyn_prop=0, id=idx, rcs=rcs, vx=vx, vy=vy,
                vx_comp=cx, vy_comp=cy,
                x_rms=int(gen.integers(0, 8)), y_rms=int(gen.integers(0, 8)),
                pdh0=int(gen.integers(0, 3)),
                vx_rms=int(gen.integers(0, 8)), vy_rms=int(gen.integers(0, 8)),
            )
        )
        idx += 1

    return RadarFrame(points=tuple(points), ego_velocity=(ego_speed, 0.0))


def write_demo_tree(
    root,
    n_images: int = 2,
    n_frames: int = 1,
    seed: int = 0,
    width: int = 320,
    height: int = 180,
) -> list[Path]:
    """Write a small input tree of demo images and radar sweeps."""
    root = Path(root)
    written = []
    img_dir = root / "camera"
    pcd_dir = root / "radar"
    img_dir.mkdir(parents=True, exist_ok=True)
    pcd_dir.mkdir(parents=True, exist_ok=True)
    for i in range(n_images):
        path = img_dir / f"scene_{i:03d}.png"
        write_image(demo_image(width, height, seed=seed + i), path)
        written.append(path)
    for i in range(n_frames):
        path = pcd_dir / f"sweep_{i:03d}.pcd"
        write_pcd(PcdFile.from_frame(demo_frame(seed=seed + 1000 + i)), path)
        written.append(path)
    return written
