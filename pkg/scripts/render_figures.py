#!/usr/bin/env python3
"""Render the standard comparison strips on the built-in demo scene.

Produces one strip per camera degradation kind and one BEV strip for the
radar pipeline, each at 0/30/60/100% levels.
"""

import argparse
from pathlib import Path

from sensornoise.core import NoiseLevel, RngStream, SensorModel
from sensornoise.dataset import write_image
from sensornoise.demo import demo_frame, demo_image
from sensornoise.camera import CameraNoiseKind
from sensornoise.validation import bev_strip, camera_strip

LEVELS = tuple(NoiseLevel(n) for n in (0.0, 0.3, 0.6, 1.0))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="figures", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--width", type=int, default=320)
    parser.add_argument("--height", type=int, default=180)
    args = parser.parse_args()

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rng = RngStream(args.seed)

    image = demo_image(args.width, args.height, seed=args.seed)
    for kind in CameraNoiseKind:
        path = out / f"camera_strip_{kind.value}.png"
        write_image(camera_strip(image, kind, LEVELS, rng), path)
        print(path)

    frame = demo_frame(seed=args.seed)
    path = out / "radar_strip_bev.png"
    write_image(bev_strip(frame, SensorModel(), LEVELS, rng), path)
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
