import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from sensornoise.core import NoiseLevel
from sensornoise.dataset import (
    ALL_CAMERA_KINDS,
    MANIFEST_NAME,
    ImageIoError,
    ManifestRecord,
    generate_dataset,
    level_token,
    read_image,
    read_manifest,
    write_image,
)
from sensornoise.demo import demo_frame, demo_image
from sensornoise.pcd import PcdFile, write_pcd

from conftest import random_image

GRID = tuple(NoiseLevel.from_class(i) for i in range(11))


def tree_bytes(root: Path) -> dict:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


@pytest.fixture
def input_tree(tmp_path):
    root = tmp_path / "input"
    (root / "cam").mkdir(parents=True)
    (root / "rad").mkdir(parents=True)
    write_image(demo_image(48, 32, seed=1), root / "cam" / "a.png")
    write_image(demo_image(48, 32, seed=2), root / "cam" / "b.png")
    write_pcd(PcdFile.from_frame(demo_frame(n_points=40, seed=3)), root / "rad" / "s.pcd")
    return root


class TestImageIo:
    def test_lossless_round_trip(self, tmp_path):
        img = random_image(1, 20, 30)
        path = tmp_path / "x.png"
        write_image(img, path)
        back = read_image(path)
        assert np.array_equal(back.data, img.data)

    def test_grayscale_promoted(self, tmp_path):
        path = tmp_path / "gray.png"
        Image.fromarray(np.arange(64, dtype=np.uint8).reshape(8, 8), mode="L").save(path)
        img = read_image(path)
        assert img.data.shape == (8, 8, 3)
        assert np.array_equal(img.data[..., 0], img.data[..., 1])

    def test_jpeg_readable(self, tmp_path):
        path = tmp_path / "x.jpg"
        Image.fromarray(random_image(2, 16, 16).data, mode="RGB").save(path, quality=90)
        img = read_image(path)
        assert img.data.shape == (16, 16, 3)

    def test_corrupt_file_raises(self, tmp_path):
        path = tmp_path / "bad.png"
        path.write_bytes(b"not an image at all")
        with pytest.raises(ImageIoError):
            read_image(path)


class TestManifestRecord:
    def test_json_round_trip(self):
        rec = ManifestRecord(
            source_path="cam/a.png", output_path="cam/a__blur_030.png",
            sensor="camera", noise_kind="blur", level_class=3,
            level_fraction=0.3, seed=99,
        )
        assert ManifestRecord.from_json(rec.to_json()) == rec

    def test_level_token(self):
        assert level_token(NoiseLevel(0.3)) == "030"
        assert level_token(NoiseLevel(1.0)) == "100"
        assert level_token(NoiseLevel(0.0)) == "000"
        assert level_token(NoiseLevel(0.375)) == "37p5"


class TestGenerateDataset:
    def test_counts_and_mirroring(self, input_tree, tmp_path):
        out = tmp_path / "out"
        records = generate_dataset(input_tree, out, levels=GRID, master_seed=5)
        camera = [r for r in records if r.sensor == "camera"]
        radar = [r for r in records if r.sensor == "radar"]
        assert len(camera) == 2 * 4 * 11
        assert len(radar) == 1 * 11
        assert all(r.error is None for r in records)
        for rec in records:
            assert (out / rec.output_path).is_file()
            assert Path(rec.output_path).parent == Path(rec.source_path).parent
        manifest = read_manifest(out / MANIFEST_NAME)
        assert manifest == records

    def test_level_classes_recorded(self, input_tree, tmp_path):
        records = generate_dataset(
            input_tree, tmp_path / "out", levels=(NoiseLevel(0.3), NoiseLevel(0.375)),
            camera_kinds=ALL_CAMERA_KINDS[:1], sensors=("camera",),
        )
        classes = {r.level_fraction: r.level_class for r in records}
        assert classes[0.3] == 3
        assert classes[0.375] is None

    def test_deterministic_across_worker_counts(self, input_tree, tmp_path):
        levels = tuple(NoiseLevel.from_class(i) for i in range(0, 11, 5))
        a = tmp_path / "a"
        b = tmp_path / "b"
        generate_dataset(input_tree, a, levels=levels, master_seed=7, workers=1)
        generate_dataset(input_tree, b, levels=levels, master_seed=7, workers=4)
        assert tree_bytes(a) == tree_bytes(b)

    def test_rerun_is_idempotent(self, input_tree, tmp_path):
        out = tmp_path / "out"
        levels = (NoiseLevel(0.0), NoiseLevel(0.5))
        generate_dataset(input_tree, out, levels=levels, master_seed=3)
        before = tree_bytes(out)
        generate_dataset(input_tree, out, levels=levels, master_seed=3)
        assert tree_bytes(out) == before

    def test_error_recorded_without_aborting(self, input_tree, tmp_path):
        (input_tree / "cam" / "broken.png").write_bytes(b"garbage")
        records = generate_dataset(
            input_tree, tmp_path / "out", levels=(NoiseLevel(0.1),), master_seed=1
        )
        failed = [r for r in records if r.error]
        fine = [r for r in records if not r.error]
        assert len(failed) == 4  # one per camera kind
        assert all("broken.png" in r.source_path for r in failed)
        assert len(fine) == 2 * 4 + 1

    def test_dry_run_writes_nothing(self, input_tree, tmp_path):
        out = tmp_path / "out"
        records = generate_dataset(input_tree, out, levels=GRID, dry_run=True)
        assert len(records) == 99
        assert not out.exists()

    def test_include_list(self, input_tree, tmp_path):
        records = generate_dataset(
            input_tree, tmp_path / "out", levels=(NoiseLevel(0.2),),
            include_list=["cam/a.png"],
        )
        assert {r.source_path for r in records} == {"cam/a.png"}

    def test_ego_lookup_constant(self, input_tree, tmp_path):
        records = generate_dataset(
            input_tree, tmp_path / "out", levels=(NoiseLevel(0.0),),
            sensors=("radar",), ego_lookup=(5.0, 0.0),
        )
        assert len(records) == 1
        assert records[0].error is None

    def test_manifest_is_utf8_json_lines(self, input_tree, tmp_path):
        out = tmp_path / "out"
        generate_dataset(input_tree, out, levels=(NoiseLevel(0.1),))
        with open(out / MANIFEST_NAME, "r", encoding="utf-8") as fh:
            for line in fh:
                record = json.loads(line)
                assert set(record) == {
                    "source_path", "output_path", "sensor", "noise_kind",
                    "level_class", "level_fraction", "seed", "error",
                }
