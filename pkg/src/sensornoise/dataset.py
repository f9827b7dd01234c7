"""Dataset generation: file traversal, image codecs, and manifest emission.

Outputs mirror the input tree with a kind/level suffix on each stem. Every
generated sample is keyed by (relative path, kind, level), so results are
identical for any worker count and reruns are idempotent for a fixed seed.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .camera import CameraNoiseKind, degrade_image
from .core import ImageBuffer, NoiseLevel, RadarFrame, RngStream, SensorModel
from .pcd import PcdError, read_pcd, write_pcd, PcdFile
from .radar import DEFAULT_CONFIG, RadarNoiseConfig, degrade_frame

__all__ = [
    "IMAGE_SUFFIXES",
    "ImageIoError",
    "ManifestRecord",
    "read_image",
    "write_image",
    "read_manifest",
    "level_token",
    "generate_dataset",
    "MANIFEST_NAME",
]

IMAGE_SUFFIXES = frozenset({".jpg", ".jpeg", ".png", ".bmp"})
PCD_SUFFIX = ".pcd"
MANIFEST_NAME = "manifest.jsonl"

ALL_CAMERA_KINDS = tuple(CameraNoiseKind)
GRID_LEVELS = tuple(NoiseLevel.from_class(i) for i in range(11))


class ImageIoError(ValueError):
    """Unreadable, unsupported, or unwritable image file."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


def read_image(path) -> ImageBuffer:
    """Decode an image into an 8-bit RGB buffer; grayscale is promoted."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            return ImageBuffer(np.asarray(rgb, dtype=np.uint8))
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageIoError(path, f"cannot decode image ({exc})") from exc


def write_image(img: ImageBuffer, path) -> None:
    """Encode to the suffix-implied format (lossless PNG default), atomically."""
    path = Path(path)
    suffix = path.suffix.lower() or ".png"
    tmp = path.with_name(path.name + ".tmp")
    try:
        Image.fromarray(img.data, mode="RGB").save(tmp, format=Image.registered_extensions().get(suffix, "PNG"))
        os.replace(tmp, path)
    except (OSError, ValueError) as exc:
        if tmp.exists():
            tmp.unlink()
        raise ImageIoError(path, f"cannot encode image ({exc})") from exc


@dataclass
class ManifestRecord:
    """One generated sample, as a line of the dataset manifest."""

    source_path: str
    output_path: str
    sensor: str
    noise_kind: str
    level_class: int | None
    level_fraction: float
    seed: int
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"), sort_keys=False)

    @classmethod
    def from_json(cls, line: str) -> "ManifestRecord":
        return cls(**json.loads(line))


def read_manifest(path) -> list[ManifestRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ManifestRecord.from_json(line))
    return records


def level_token(level: NoiseLevel) -> str:
    """Filename token for a level: zero-padded percent, e.g. 030 for 30%."""
    p = level.percent()
    if abs(p - round(p)) < 1e-9:
        return f"{int(round(p)):03d}"
    return f"{p:g}".replace(".", "p")


def _grid_class(level: NoiseLevel) -> int | None:
    try:
        return level.class_index()
    except ValueError:
        return None


@dataclass
class _FileTask:
    rel: Path
    sensor: str
    jobs: list  # (kind_name, NoiseLevel, out_rel)


def _plan(
    input_root: Path,
    sensors: Sequence[str],
    camera_kinds: Sequence[CameraNoiseKind],
    levels: Sequence[NoiseLevel],
    include: set[str] | None,
) -> list[_FileTask]:
    tasks: list[_FileTask] = []
    for path in sorted(input_root.rglob("*")):
        if not path.is_file():
            continue
        rel = path.relative_to(input_root)
        if include is not None and rel.as_posix() not in include:
            continue
        suffix = path.suffix.lower()
        if suffix in IMAGE_SUFFIXES and "camera" in sensors:
            jobs = [
                (kind.value, level, rel.with_name(f"{rel.stem}__{kind.value}_{level_token(level)}.png"))
                for kind in camera_kinds
                for level in levels
            ]
            tasks.append(_FileTask(rel=rel, sensor="camera", jobs=jobs))
        elif suffix == PCD_SUFFIX and "radar" in sensors:
            jobs = [
                ("radar", level, rel.with_name(f"{rel.stem}__radar_{level_token(level)}.pcd"))
                for level in levels
            ]
            tasks.append(_FileTask(rel=rel, sensor="radar", jobs=jobs))
    return tasks


def _ego_for(ego_lookup, rel: Path) -> tuple[float, float] | None:
    if ego_lookup is None:
        return None
    if isinstance(ego_lookup, dict):
        value = ego_lookup.get(rel.as_posix())
        return tuple(value) if value is not None else None
    return tuple(ego_lookup)


def _run_task(
    task: _FileTask,
    input_root: Path,
    output_root: Path,
    stream: RngStream,
    model: SensorModel,
    radar_config: RadarNoiseConfig,
    ego_lookup,
    master_seed: int,
    overwrite: bool,
) -> list[ManifestRecord]:
    records: list[ManifestRecord] = []

    def record(job, error=None):
        kind_name, level, out_rel = job
        return ManifestRecord(
            source_path=task.rel.as_posix(),
            output_path=out_rel.as_posix(),
            sensor=task.sensor,
            noise_kind=kind_name,
            level_class=_grid_class(level),
            level_fraction=level.n,
            seed=master_seed,
            error=error,
        )

    src = input_root / task.rel
    try:
        if task.sensor == "camera":
            img = read_image(src)
            source = img
        else:
            pcd = read_pcd(src)
            source = pcd
    except (ImageIoError, PcdError) as exc:
        return [record(job, error=str(exc)) for job in task.jobs]

    for job in task.jobs:
        kind_name, level, out_rel = job
        out_path = output_root / out_rel
        try:
            if overwrite or not out_path.exists():
                out_path.parent.mkdir(parents=True, exist_ok=True)
                rng = stream.child(task.sensor, task.rel.as_posix(), kind_name, level_token(level))
                if task.sensor == "camera":
                    kind = CameraNoiseKind.from_name(kind_name)
                    write_image(degrade_image(source, kind, level, rng), out_path)
                else:
                    frame = source.frame(ego_velocity=_ego_for(ego_lookup, task.rel))
                    degraded, _ = degrade_frame(frame, model, level, rng, radar_config)
                    out = PcdFile.from_frame(degraded)
                    write_pcd(out, out_path)
            records.append(record(job))
        except (ImageIoError, PcdError, ValueError) as exc:
            records.append(record(job, error=str(exc)))
    return records


def generate_dataset(
    input_root,
    output_root,
    levels: Sequence[NoiseLevel] = GRID_LEVELS,
    camera_kinds: Sequence[CameraNoiseKind] = ALL_CAMERA_KINDS,
    master_seed: int = 0,
    workers: int = 1,
    sensors: Sequence[str] = ("camera", "radar"),
    sensor_model: SensorModel = SensorModel(),
    radar_config: RadarNoiseConfig = DEFAULT_CONFIG,
    include_list: Iterable[str] | None = None,
    ego_lookup=None,
    dry_run: bool = False,
    overwrite: bool = False,
    write_manifest: bool = True,
) -> list[ManifestRecord]:
    """Degrade every input sample across the kind and level grid.

    One output file and one manifest record per (input, kind, level). Per-file
    failures land in the manifest's ``error`` field without aborting the run.
    Existing outputs are kept unless ``overwrite`` is set, which together with
    seeded streams makes reruns resumable and idempotent.
    """
    input_root = Path(input_root)
    output_root = Path(output_root)
    if not input_root.is_dir():
        raise ValueError(f"input root {input_root} is not a directory")
    include = {Path(p).as_posix() for p in include_list} if include_list is not None else None
    tasks = _plan(input_root, tuple(sensors), tuple(camera_kinds), tuple(levels), include)

    if dry_run:
        dry = []
        for task in tasks:
            for kind_name, level, out_rel in task.jobs:
                dry.append(
                    ManifestRecord(
                        source_path=task.rel.as_posix(),
                        output_path=out_rel.as_posix(),
                        sensor=task.sensor,
                        noise_kind=kind_name,
                        level_class=_grid_class(level),
                        level_fraction=level.n,
                        seed=master_seed,
                    )
                )
        return dry

    stream = RngStream(master_seed)
    output_root.mkdir(parents=True, exist_ok=True)

    def run(task):
        return _run_task(
            task, input_root, output_root, stream, sensor_model,
            radar_config, ego_lookup, master_seed, overwrite,
        )

    all_records: list[ManifestRecord] = []
    if workers <= 1:
        for task in tasks:
            all_records.extend(run(task))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # Futures collected in plan order: the manifest is scheduling-independent.
            for result in pool.map(run, tasks):
                all_records.extend(result)

    if write_manifest:
        manifest_path = output_root / MANIFEST_NAME
        tmp = manifest_path.with_name(manifest_path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for rec in all_records:
                fh.write(rec.to_json() + "\n")
        os.replace(tmp, manifest_path)
    return all_records
