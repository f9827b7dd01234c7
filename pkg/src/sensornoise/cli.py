"""Batch command-line entry point.

Subcommands: camera, radar, gen-dataset, validate, render. Exit codes:
0 success, 1 any file or check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .camera import CameraNoiseKind
from .core import NoiseLevel, RngStream, SensorModel
from .dataset import (
    ALL_CAMERA_KINDS,
    GRID_LEVELS,
    IMAGE_SUFFIXES,
    generate_dataset,
    read_image,
    write_image,
)
from .demo import demo_frame, demo_image
from .pcd import read_pcd
from .radar import RadarNoiseConfig
from .validation import bev_strip, camera_strip, default_validation_report

__all__ = ["RunConfig", "ConfigError", "parse_level_token", "main"]

EXIT_OK = 0
EXIT_FILE_FAILURE = 1
EXIT_CONFIG_ERROR = 2


class ConfigError(ValueError):
    pass


def parse_level_token(token: str) -> NoiseLevel:
    """Parse a level flag value into the canonical fraction.

    ``NN%`` is percent and ``NNf`` is a fraction. A bare value above 1 up to
    100 reads as percent; bare values in (0, 1] are ambiguous between the two
    units and are rejected, as are bare values above 100.
    """
    token = token.strip()
    try:
        if token.endswith("%"):
            return NoiseLevel.from_percent(float(token[:-1]))
        if token.endswith(("f", "F")):
            return NoiseLevel(float(token[:-1]))
        value = float(token)
    except ValueError as exc:
        raise ConfigError(f"cannot parse level {token!r}: {exc}") from None
    if value == 0.0:
        return NoiseLevel(0.0)
    if 1.0 < value <= 100.0:
        return NoiseLevel.from_percent(value)
    raise ConfigError(
        f"level {token!r} is ambiguous; add a unit suffix like {token}% or {token}f"
    )


def _parse_levels(spec: str) -> tuple[float, ...]:
    if spec.strip().lower() == "grid":
        return tuple(level.n for level in GRID_LEVELS)
    return tuple(parse_level_token(t).n for t in spec.split(",") if t.strip())


def _parse_kinds(spec: str) -> tuple[str, ...]:
    kinds = tuple(t.strip() for t in spec.split(",") if t.strip())
    for kind in kinds:
        CameraNoiseKind.from_name(kind)
    return kinds


@dataclass
class RunConfig:
    """One batch run, serializable to and from a JSON config file."""

    input_root: str | None = None
    output_root: str | None = None
    sensors: tuple[str, ...] = ("camera", "radar")
    camera_kinds: tuple[str, ...] = tuple(k.value for k in ALL_CAMERA_KINDS)
    levels: tuple[float, ...] = tuple(level.n for level in GRID_LEVELS)
    master_seed: int = 0
    workers: int = 1
    sensor_model: dict = dataclasses.field(default_factory=dict)
    disable_threshold_noise: bool = False
    skip_shift_at_zero: bool = False
    ego_metadata: str | None = None
    include_list: str | None = None
    dry_run: bool = False

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**raw)
        cfg.sensors = tuple(cfg.sensors)
        cfg.camera_kinds = tuple(cfg.camera_kinds)
        cfg.levels = tuple(cfg.levels)
        return cfg

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2)
            fh.write("\n")

    def build_sensor_model(self) -> SensorModel:
        if not self.sensor_model:
            return SensorModel()
        overrides = dict(self.sensor_model)
        if "fov_brackets" in overrides:
            overrides["fov_brackets"] = tuple(
                (float("inf") if u in ("inf", None) else float(u), float(h))
                for u, h in overrides["fov_brackets"]
            )
        try:
            return SensorModel(**overrides)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad sensor model override: {exc}") from exc

    def build_radar_config(self) -> RadarNoiseConfig:
        return RadarNoiseConfig(
            disable_threshold_noise=self.disable_threshold_noise,
            skip_shift_at_zero=self.skip_shift_at_zero,
        )

    def noise_levels(self) -> tuple[NoiseLevel, ...]:
        return tuple(NoiseLevel(n) for n in self.levels)

    def kinds(self) -> tuple[CameraNoiseKind, ...]:
        return tuple(CameraNoiseKind.from_name(k) for k in self.camera_kinds)


def _load_ego_lookup(spec: str | None):
    if spec is None:
        return None
    if "," in spec and not Path(spec).exists():
        try:
            vx, vy = (float(v) for v in spec.split(","))
            return (vx, vy)
        except ValueError:
            raise ConfigError(f"cannot parse ego velocity {spec!r}") from None
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            table = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load ego metadata {spec}: {exc}") from exc
    return {str(k): tuple(v) for k, v in table.items()}


def _load_include_list(spec: str | None):
    if spec is None:
        return None
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            return [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot load include list {spec}: {exc}") from exc


def _merge_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if getattr(args, "input", None) is not None:
        cfg.input_root = args.input
    if getattr(args, "output", None) is not None:
        cfg.output_root = args.output
    if getattr(args, "seed", None) is not None:
        cfg.master_seed = args.seed
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    if getattr(args, "levels", None) is not None:
        cfg.levels = _parse_levels(args.levels)
    if getattr(args, "kinds", None) is not None:
        cfg.camera_kinds = _parse_kinds(args.kinds)
    if getattr(args, "dry_run", False):
        cfg.dry_run = True
    if getattr(args, "no_w_noise", False):
        cfg.disable_threshold_noise = True
    if getattr(args, "skip_shift_at_zero", False):
        cfg.skip_shift_at_zero = True
    if getattr(args, "ego_metadata", None) is not None:
        cfg.ego_metadata = args.ego_metadata
    if getattr(args, "include_list", None) is not None:
        cfg.include_list = args.include_list
    for item in getattr(args, "sensor_model", None) or []:
        if "=" not in item:
            raise ConfigError(f"sensor model override must be key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            cfg.sensor_model[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg.sensor_model[key] = value
    return cfg


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    return _merge_flags(cfg, args)


def _single_file_run(cfg: RunConfig, sensors: tuple[str, ...]) -> int:
    """Degrade one file or one tree through the shared dataset runner."""
    if cfg.input_root is None or cfg.output_root is None:
        raise ConfigError("--input and --output are required")
    input_path = Path(cfg.input_root)
    output_path = Path(cfg.output_root)
    if not input_path.exists():
        raise ConfigError(f"input {input_path} does not exist")

    include = _load_include_list(cfg.include_list)
    if input_path.is_file():
        include = [input_path.name]
        input_root = input_path.parent
        single_target = output_path if output_path.suffix else None
        output_root = output_path.parent if single_target else output_path
    else:
        input_root = input_path
        single_target = None
        output_root = output_path

    records = generate_dataset(
        input_root,
        output_root,
        levels=cfg.noise_levels(),
        camera_kinds=cfg.kinds(),
        master_seed=cfg.master_seed,
        workers=cfg.workers,
        sensors=sensors,
        sensor_model=cfg.build_sensor_model(),
        radar_config=cfg.build_radar_config(),
        include_list=include,
        ego_lookup=_load_ego_lookup(cfg.ego_metadata),
        dry_run=cfg.dry_run,
        write_manifest=False,
    )
    if cfg.dry_run:
        for rec in records:
            print(rec.output_path)
        return EXIT_OK
    if single_target is not None:
        if len(records) != 1:
            raise ConfigError(
                "output file path requires exactly one kind and one level "
                f"(planned {len(records)} outputs); pass an output directory instead"
            )
        produced = output_root / records[0].output_path
        produced.replace(single_target)
        records[0].output_path = single_target.name
    failures = [r for r in records if r.error]
    for rec in failures:
        print(f"error: {rec.source_path}: {rec.error}", file=sys.stderr)
    return EXIT_FILE_FAILURE if failures else EXIT_OK


def cmd_camera(args: argparse.Namespace) -> int:
    return _single_file_run(_config_from_args(args), sensors=("camera",))


def cmd_radar(args: argparse.Namespace) -> int:
    return _single_file_run(_config_from_args(args), sensors=("radar",))


def cmd_gen_dataset(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if cfg.input_root is None or cfg.output_root is None:
        raise ConfigError("--input and --output are required")
    if not Path(cfg.input_root).is_dir():
        raise ConfigError(f"input root {cfg.input_root} is not a directory")
    records = generate_dataset(
        cfg.input_root,
        cfg.output_root,
        levels=cfg.noise_levels(),
        camera_kinds=cfg.kinds(),
        master_seed=cfg.master_seed,
        workers=cfg.workers,
        sensors=cfg.sensors,
        sensor_model=cfg.build_sensor_model(),
        radar_config=cfg.build_radar_config(),
        include_list=_load_include_list(cfg.include_list),
        ego_lookup=_load_ego_lookup(cfg.ego_metadata),
        dry_run=cfg.dry_run,
    )
    if cfg.dry_run:
        for rec in records:
            print(rec.output_path)
        return EXIT_OK
    failures = [r for r in records if r.error]
    print(f"generated {len(records) - len(failures)} outputs, {len(failures)} failures")
    for rec in failures:
        print(f"error: {rec.source_path}: {rec.error}", file=sys.stderr)
    return EXIT_FILE_FAILURE if failures else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    report = default_validation_report(
        master_seed=cfg.master_seed,
        quick=getattr(args, "quick", False),
        config=cfg.build_radar_config(),
    )
    print(report.to_text())
    return EXIT_OK if report.passed else EXIT_FILE_FAILURE


def cmd_render(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if cfg.output_root is None:
        raise ConfigError("--output is required")
    levels_spec = getattr(args, "levels", None)
    levels = (
        tuple(NoiseLevel(n) for n in _parse_levels(levels_spec))
        if levels_spec is not None
        else tuple(NoiseLevel(n) for n in (0.0, 0.3, 0.6, 1.0))
    )
    out_dir = Path(cfg.output_root)
    if not cfg.dry_run:
        out_dir.mkdir(parents=True, exist_ok=True)
    rng = RngStream(cfg.master_seed)

    if cfg.input_root is None:
        image = demo_image(seed=cfg.master_seed)
        frame = demo_frame(seed=cfg.master_seed)
        stem = "demo"
    else:
        source = Path(cfg.input_root)
        if not source.exists():
            raise ConfigError(f"input {source} does not exist")
        stem = source.stem
        image = frame = None
        if source.suffix.lower() in IMAGE_SUFFIXES:
            image = read_image(source)
        elif source.suffix.lower() == ".pcd":
            frame = read_pcd(source).frame()
        else:
            raise ConfigError(f"render input must be an image or a .pcd file, got {source}")

    written = []
    if image is not None:
        for kind in cfg.kinds():
            path = out_dir / f"{stem}__strip_{kind.value}.png"
            if not cfg.dry_run:
                write_image(camera_strip(image, kind, levels, rng), path)
            written.append(path)
    if frame is not None:
        path = out_dir / f"{stem}__strip_bev.png"
        if not cfg.dry_run:
            write_image(
                bev_strip(frame, cfg.build_sensor_model(), levels, rng, cfg.build_radar_config()),
                path,
            )
        written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_kinds: bool = True) -> None:
    parser.add_argument("--input", help="input file or directory")
    parser.add_argument("--output", help="output file or directory")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--levels", help="comma-separated levels (30%%, 0.3f) or 'grid'")
    if with_kinds:
        parser.add_argument("--kinds", help="comma-separated camera noise kinds")
    parser.add_argument("--workers", type=int, help="worker thread count")
    parser.add_argument("--config", help="JSON run config; flags override file values")
    parser.add_argument("--dry-run", action="store_true", help="list planned outputs only")


def _add_radar_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ego-metadata", help="'vx,vy' or JSON file {relpath: [vx, vy]}")
    parser.add_argument("--no-w-noise", action="store_true",
                        help="disable the detection-threshold jitter (test hook)")
    parser.add_argument("--skip-shift-at-zero", action="store_true",
                        help="bypass measurement shifts when the level is 0")
    parser.add_argument("--sensor-model", action="append", metavar="KEY=VALUE",
                        help="sensor model field override, repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensornoise",
        description="Synthesize camera and radar sensor failures on drive data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cam = sub.add_parser("camera", help="degrade one image or an image tree")
    _add_common(p_cam)
    p_cam.set_defaults(func=cmd_camera)

    p_rad = sub.add_parser("radar", help="degrade one radar sweep or a tree")
    _add_common(p_rad, with_kinds=False)
    _add_radar_flags(p_rad)
    p_rad.set_defaults(func=cmd_radar)

    p_gen = sub.add_parser("gen-dataset", help="full grid generation with manifest")
    _add_common(p_gen)
    _add_radar_flags(p_gen)
    p_gen.add_argument("--include-list", help="file of relative paths to restrict inputs")
    p_gen.set_defaults(func=cmd_gen_dataset)

    p_val = sub.add_parser("validate", help="run the statistical validation suite")
    _add_common(p_val, with_kinds=False)
    p_val.add_argument("--quick", action="store_true", help="reduced trial counts")
    p_val.add_argument("--no-w-noise", action="store_true", help=argparse.SUPPRESS)
    p_val.set_defaults(func=cmd_validate)

    p_ren = sub.add_parser("render", help="emit degradation comparison strips")
    _add_common(p_ren)
    _add_radar_flags(p_ren)
    p_ren.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
