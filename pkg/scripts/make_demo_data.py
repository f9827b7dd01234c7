#!/usr/bin/env python3
"""Write a synthetic demo input tree (images + radar sweeps) for experiments.

The generated tree feeds `sensornoise gen-dataset` when no real drive data is
at hand, e.g.:

    python scripts/make_demo_data.py --output demo_in --images 4 --frames 2
    sensornoise gen-dataset --input demo_in --output demo_out --levels grid
"""

import argparse

from sensornoise.demo import write_demo_tree


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", required=True, help="tree root to create")
    parser.add_argument("--images", type=int, default=2, help="number of demo images")
    parser.add_argument("--frames", type=int, default=1, help="number of demo radar sweeps")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--width", type=int, default=320)
    parser.add_argument("--height", type=int, default=180)
    args = parser.parse_args()
    written = write_demo_tree(
        args.output,
        n_images=args.images,
        n_frames=args.frames,
        seed=args.seed,
        width=args.width,
        height=args.height,
    )
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
