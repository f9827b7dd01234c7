"""Reader and writer for the 18-field automotive radar PCD layout (v0.7).

Reading keeps the raw header bytes so an unmodified file rewrites
byte-identically. Headers are regenerated canonically whenever the point
count changes or the source was ASCII (output is always binary).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .core import RadarFrame, RadarPoint

__all__ = [
    "RADAR_FIELDS",
    "PcdError",
    "PcdSchemaError",
    "PcdTruncatedError",
    "PcdDataModeError",
    "PcdFile",
    "read_pcd",
    "write_pcd",
]

RADAR_FIELDS = (
    "x", "y", "z", "dyn_prop", "id", "rcs", "vx", "vy", "vx_comp", "vy_comp",
    "is_quality_valid", "ambig_state", "x_rms", "y_rms", "invalid_state",
    "pdh0", "vx_rms", "vy_rms",
)
RADAR_SIZES = (4, 4, 4, 1, 2, 4, 4, 4, 4, 4, 1, 1, 1, 1, 1, 1, 1, 1)
RADAR_TYPES = ("F", "F", "F", "I", "I", "F", "F", "F", "F", "F",
               "I", "I", "I", "I", "I", "I", "I", "I")

_FLOAT_FIELDS = frozenset(
    name for name, t in zip(RADAR_FIELDS, RADAR_TYPES) if t == "F"
)

_RECORD_DTYPE = np.dtype(
    [
        (name, f"<f{size}" if typ == "F" else f"<i{size}")
        for name, size, typ in zip(RADAR_FIELDS, RADAR_SIZES, RADAR_TYPES)
    ]
)
_RECORD_BYTES = _RECORD_DTYPE.itemsize

_REQUIRED_KEYS = (
    "VERSION", "FIELDS", "SIZE", "TYPE", "COUNT",
    "WIDTH", "HEIGHT", "VIEWPOINT", "POINTS", "DATA",
)


class PcdError(ValueError):
    """Malformed or unsupported PCD content."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


class PcdSchemaError(PcdError):
    """Header declares a field layout other than the 18-field radar schema."""


class PcdTruncatedError(PcdError):
    """Payload shorter than the declared point count."""


class PcdDataModeError(PcdError):
    """DATA mode is neither binary nor ascii."""


@dataclass
class PcdFile:
    """One parsed radar sweep file: point records plus header context."""

    points: tuple[RadarPoint, ...]
    viewpoint: str = "0 0 0 1 0 0 0"
    data_mode: str = "binary"
    raw_header: bytes | None = None
    declared_points: int = -1
    trailing: bytes = b""

    def __post_init__(self) -> None:
        self.points = tuple(self.points)
        if self.declared_points < 0:
            self.declared_points = len(self.points)

    @classmethod
    def from_frame(cls, frame: RadarFrame) -> "PcdFile":
        return cls(points=frame.points)

    def frame(self, ego_velocity: tuple[float, float] | None = None) -> RadarFrame:
        return RadarFrame(points=self.points, ego_velocity=ego_velocity)


def _canonical_header(n_points: int, viewpoint: str) -> bytes:
    lines = [
        "# .PCD v0.7 - Point Cloud Data file format",
        "VERSION 0.7",
        "FIELDS " + " ".join(RADAR_FIELDS),
        "SIZE " + " ".join(str(s) for s in RADAR_SIZES),
        "TYPE " + " ".join(RADAR_TYPES),
        "COUNT " + " ".join("1" for _ in RADAR_FIELDS),
        f"WIDTH {n_points}",
        "HEIGHT 1",
        f"VIEWPOINT {viewpoint}",
        f"POINTS {n_points}",
        "DATA binary",
    ]
    return ("\n".join(lines) + "\n").encode("ascii")


def _records_to_points(records: np.ndarray) -> tuple[RadarPoint, ...]:
    points = []
    for rec in records:
        kwargs = {}
        for name in RADAR_FIELDS:
            value = rec[name]
            kwargs[name] = float(value) if name in _FLOAT_FIELDS else int(value)
        points.append(RadarPoint(**kwargs))
    return tuple(points)


def _points_to_records(points) -> np.ndarray:
    records = np.zeros(len(points), dtype=_RECORD_DTYPE)
    for i, p in enumerate(points):
        for name in RADAR_FIELDS:
            records[name][i] = getattr(p, name)
    return records


def _expect_tokens(path, line: str, key: str, expected: tuple) -> None:
    got = line.split()[1:]
    want = [str(v) for v in expected]
    if got == want:
        return
    if key == "FIELDS":
        missing = [f for f in want if f not in got]
        extra = [f for f in got if f not in want]
        detail = []
        if missing:
            detail.append("missing " + ", ".join(missing))
        if extra:
            detail.append("unexpected " + ", ".join(extra))
        if not detail:
            detail.append("field order differs")
        raise PcdSchemaError(path, f"FIELDS mismatch ({'; '.join(detail)}) in header line {line!r}")
    raise PcdSchemaError(path, f"{key} mismatch in header line {line!r} (expected {' '.join(want)})")


def read_pcd(path) -> PcdFile:
    """Parse a radar PCD file, validating the exact 18-field schema."""
    with open(path, "rb") as fh:
        header_bytes = b""
        entries: dict[str, str] = {}
        while True:
            line = fh.readline()
            if not line:
                raise PcdSchemaError(path, "end of file before DATA header line")
            header_bytes += line
            try:
                text = line.decode("ascii").strip()
            except UnicodeDecodeError:
                raise PcdSchemaError(path, f"undecodable header line {line!r}") from None
            if not text or text.startswith("#"):
                continue
            key = text.split()[0].upper()
            entries[key] = text
            if key == "DATA":
                break
        payload = fh.read()

    for key in _REQUIRED_KEYS:
        if key not in entries:
            raise PcdSchemaError(path, f"missing header entry {key}")

    _expect_tokens(path, entries["FIELDS"], "FIELDS", RADAR_FIELDS)
    _expect_tokens(path, entries["SIZE"], "SIZE", RADAR_SIZES)
    _expect_tokens(path, entries["TYPE"], "TYPE", RADAR_TYPES)
    _expect_tokens(path, entries["COUNT"], "COUNT", tuple(1 for _ in RADAR_FIELDS))

    try:
        width = int(entries["WIDTH"].split()[1])
        height = int(entries["HEIGHT"].split()[1])
        n_points = int(entries["POINTS"].split()[1])
    except (IndexError, ValueError):
        raise PcdSchemaError(path, "unparsable WIDTH/HEIGHT/POINTS header entry") from None
    if width * height != n_points:
        raise PcdSchemaError(
            path,
            f"WIDTH x HEIGHT = {width * height} does not match POINTS {n_points}",
        )
    viewpoint = entries["VIEWPOINT"].split(maxsplit=1)[1] if len(entries["VIEWPOINT"].split()) > 1 else ""

    mode = entries["DATA"].split()[1].lower() if len(entries["DATA"].split()) > 1 else ""
    if mode not in ("binary", "ascii"):
        raise PcdDataModeError(path, f"unsupported data mode in header line {entries['DATA']!r}")

    if mode == "binary":
        need = n_points * _RECORD_BYTES
        if len(payload) < need:
            raise PcdTruncatedError(
                path,
                f"binary payload holds {len(payload)} bytes, {need} needed for {n_points} points",
            )
        trailing = payload[need:]
        if trailing.strip(b" \t\r\n"):
            raise PcdError(path, f"{len(trailing)} unexpected non-whitespace bytes after payload")
        records = np.frombuffer(payload[:need], dtype=_RECORD_DTYPE)
    else:
        rows = [r for r in payload.decode("ascii").splitlines() if r.strip()]
        if len(rows) < n_points:
            raise PcdTruncatedError(
                path, f"ascii payload holds {len(rows)} rows, {n_points} declared"
            )
        records = np.zeros(n_points, dtype=_RECORD_DTYPE)
        for i in range(n_points):
            tokens = rows[i].split()
            if len(tokens) != len(RADAR_FIELDS):
                raise PcdSchemaError(
                    path, f"ascii row {i} holds {len(tokens)} values, {len(RADAR_FIELDS)} expected"
                )
            for name, token in zip(RADAR_FIELDS, tokens):
                records[name][i] = float(token) if name in _FLOAT_FIELDS else int(token)
        trailing = b""

    return PcdFile(
        points=_records_to_points(records),
        viewpoint=viewpoint,
        data_mode=mode,
        raw_header=header_bytes,
        declared_points=n_points,
        trailing=trailing,
    )


def write_pcd(pcd: PcdFile, path) -> None:
    """Write a radar PCD file in binary mode, atomically (temp + rename)."""
    n = len(pcd.points)
    reuse = (
        pcd.raw_header is not None
        and pcd.data_mode == "binary"
        and pcd.declared_points == n
    )
    header = pcd.raw_header if reuse else _canonical_header(n, pcd.viewpoint)
    payload = _points_to_records(pcd.points).tobytes()
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        if reuse:
            fh.write(pcd.trailing)
    os.replace(tmp, path)
