"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass/fail lines alongside the pytest output.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from sensornoise.camera import (
    ExposureDirection,
    apply_blur,
    blur_kernel_size,
    exposure_kernel,
    gaussian_kernel,
)
from sensornoise.cli import main
from sensornoise.core import NoiseLevel, RadarFrame, RadarPoint, RngStream, SensorModel
from sensornoise.dataset import write_image
from sensornoise.demo import demo_frame, demo_image, write_demo_tree
from sensornoise.pcd import (
    PcdFile,
    PcdSchemaError,
    PcdTruncatedError,
    read_pcd,
    write_pcd,
)
from sensornoise.radar import (
    RadarNoiseConfig,
    apply_false_negatives,
    azimuth_bounds,
    detection_coefficient,
    generate_ghost_points,
)
from sensornoise.validation import (
    check_camera_noise_std,
    check_dropout_monotonicity,
    check_shift_scaling,
    dropout_fixture_frame,
    shift_fixture,
)

from conftest import random_frame, random_image
from test_camera import naive_convolve
from test_pcd import fixture_bytes

NO_W = RadarNoiseConfig(disable_threshold_noise=True)


def report(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status} - {name}{suffix}")
    assert passed, f"{name}: {detail}"


def tree_bytes(root: Path) -> dict:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_snr_factor_contract():
    from sensornoise.core import snr_scale

    ok = abs(snr_scale(NoiseLevel(1.0)) - 0.1) <= 1e-12
    ok &= abs(snr_scale(NoiseLevel(0.0)) - 1.0) <= 1e-12
    worst = 0.0
    for k in range(101):
        n = k / 100.0
        worst = max(worst, abs(math.log10(snr_scale(NoiseLevel(n))) + n))
    ok &= worst <= 1e-12
    report("SNR factor contract (endpoints and log-linearity, 101 points)", ok,
           f"max log deviation {worst:.2e}")


def test_blur_kernel_size_law():
    got = [blur_kernel_size(NoiseLevel(n)) for n in (0.0, 0.3, 0.6, 1.0)]
    report("blur kernel size law at 0/30/60/100%", got == [1, 61, 121, 201],
           f"sizes {got}")


def test_exposure_kernel_contract():
    base = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]], dtype=np.float64) / 16.0
    zero = exposure_kernel(NoiseLevel(0.0), ExposureDirection.HIGH)
    ok = np.array_equal(zero.weights, base)
    high = exposure_kernel(NoiseLevel(1.0), ExposureDirection.HIGH).weight_sum()
    low = exposure_kernel(NoiseLevel(1.0), ExposureDirection.LOW).weight_sum()
    ok &= abs(high - 4.0) <= 1e-9 and abs(low - 0.25) <= 1e-9
    report("exposure kernel base matrix and full-level weight sums", bool(ok),
           f"sums {high:.10f}/{low:.10f}")


def test_additive_noise_calibration():
    rng = RngStream(2024)
    details = []
    ok = True
    for n in (0.25, 0.5, 1.0):
        result = check_camera_noise_std(NoiseLevel(n), 65536, rng.child(n))
        ok &= result.passed
        details.append(f"n={n}: {result.measured:.2f}")
    report("additive noise std within 3% at 25/50/100%, 65536 samples each",
           ok, "; ".join(details))


def test_false_negative_zero_case_and_monotonicity():
    rng = RngStream(77)
    drops = 0
    for seed in range(50):
        frame = random_frame(seed)
        _, dropped = apply_false_negatives(frame, NoiseLevel(0.0), rng.child(seed), NO_W)
        drops += len(dropped)
    zero_ok = drops == 0

    frame = dropout_fixture_frame(100)
    levels = [NoiseLevel(v / 10.0) for v in range(0, 11, 2)]
    result = check_dropout_monotonicity(frame, levels, 200, rng)
    report("false negatives: zero case on 50 frames and monotone means (200 seeds/level)",
           zero_ok and result.passed,
           f"zero-level drops {drops}; {result.note}")


def test_cramer_rao_shift_scaling():
    rng = RngStream(31)
    point, frame = shift_fixture()
    results = check_shift_scaling(
        point, frame, (NoiseLevel(0.0), NoiseLevel(1.0)), 10**5, rng
    )
    ok = all(r.passed for r in results)
    detail = "; ".join(f"{r.name.split('(')[1].split(')')[0]} ratio {r.measured:.4f}" for r in results)
    report("measurement shift std ratios 0->100% equal 10^0.5 within 5%, 1e5 trials",
           ok, detail)


def test_ghost_constraints_over_1000_frames():
    rng = RngStream(5150)
    model = SensorModel()
    counts = []
    ok = True
    why = ""
    for i in range(1000):
        frame = random_frame(i, n_points=10 + (i % 60))
        ghosts = generate_ghost_points(frame, model, rng.child("ghost", i))
        counts.append(len(ghosts))
        if not 0 <= len(ghosts) <= 4:
            ok, why = False, f"count {len(ghosts)} out of range"
            break
        rcs_values = set(p.rcs for p in frame.points)
        r_hi = min(frame.r_max_frame + model.ghost_margin, model.r_abs_max)
        for g in ghosts:
            lo, hi = azimuth_bounds(g.r, model)
            if not (model.r_min <= g.r <= r_hi and lo <= g.theta <= hi):
                ok, why = False, "ghost outside FOV bracket or range window"
                break
            if g.rcs not in rcs_values:
                ok, why = False, "ghost RCS not in the frame multiset"
                break
            cross = g.vx_comp * g.y - g.vy_comp * g.x
            norm = math.hypot(g.vx_comp, g.vy_comp) * g.r
            if norm > 0 and abs(cross) >= 1e-9 * norm:
                ok, why = False, "ghost compensated velocity not radial"
                break
        if not ok:
            break
    mean = float(np.mean(counts)) if counts else 0.0
    report("ghost constraints over 1000 frames (count, FOV, radiality, RCS membership)",
           ok and counts and abs(mean - 2.0) <= 0.1,
           why or f"mean count {mean:.3f}")


def test_brute_force_oracle_equivalence():
    spec = [
        (10.0, 0.0, 5.0),
        (20.0, 10.0, 0.0),
        (50.0, -20.0, 12.0),
        (80.0, 30.0, -3.0),
        (120.0, -5.0, 20.0),
    ]
    frame = RadarFrame(points=tuple(
        RadarPoint(x=x, y=y, rcs=rcs, id=i) for i, (x, y, rcs) in enumerate(spec)
    ))
    rng = RngStream(1)
    coeff_ok = True
    for n in (0.0, 0.5, 1.0):
        for p in frame.points:
            oracle = (10.0 ** (p.rcs / 10.0)) / (math.hypot(p.x, p.y) ** 4) * (10.0 ** -n)
            if detection_coefficient(p, frame, NoiseLevel(n), rng, NO_W) != oracle:
                coeff_ok = False

    blur_ok = True
    for seed in range(40):
        img = random_image(seed)
        for n in (0.0, 0.01, 0.02):  # kernel sizes 1, 3, 5
            size = blur_kernel_size(NoiseLevel(n))
            expected = naive_convolve(img.data, gaussian_kernel(size).weights)
            if not np.array_equal(apply_blur(img, NoiseLevel(n)).data, expected):
                blur_ok = False
    report("brute-force oracle equivalence (detectability coefficients, blur k<=5)",
           coeff_ok and blur_ok,
           f"coefficients {'ok' if coeff_ok else 'MISMATCH'}, blur {'ok' if blur_ok else 'MISMATCH'}")


def test_pcd_codec_round_trip_and_errors(tmp_path):
    src = tmp_path / "sweep.pcd"
    src.write_bytes(fixture_bytes())
    out = tmp_path / "copy.pcd"
    write_pcd(read_pcd(src), out)
    round_trip_ok = out.read_bytes() == src.read_bytes()

    gen = tmp_path / "gen.pcd"
    write_pcd(PcdFile.from_frame(demo_frame(n_points=50, seed=8)), gen)
    out2 = tmp_path / "gen2.pcd"
    write_pcd(read_pcd(gen), out2)
    round_trip_ok &= out2.read_bytes() == gen.read_bytes()

    short = tmp_path / "short.pcd"
    short.write_bytes(fixture_bytes().replace(b" vy_rms", b""))
    errors_ok = False
    try:
        read_pcd(short)
    except PcdSchemaError as exc:
        errors_ok = "vy_rms" in str(exc)
    trunc = tmp_path / "trunc.pcd"
    trunc.write_bytes(fixture_bytes()[:-5])
    try:
        read_pcd(trunc)
        errors_ok = False
    except PcdTruncatedError:
        pass
    report("radar file codec byte-identical round-trip and named schema errors",
           round_trip_ok and errors_ok)


def test_dataset_determinism_across_workers(tmp_path):
    root = tmp_path / "in"
    write_demo_tree(root, n_images=2, n_frames=1, seed=0, width=48, height=32)
    a, b = tmp_path / "a", tmp_path / "b"
    for out, workers in ((a, "1"), (b, "4")):
        code = main([
            "gen-dataset", "--input", str(root), "--output", str(out),
            "--levels", "grid", "--seed", "42", "--workers", workers,
        ])
        assert code == 0
    trees_equal = tree_bytes(a) == tree_bytes(b)
    count = len(tree_bytes(a))
    report("dataset generation byte-identical across worker counts, same seed",
           trees_equal and count == 99 + 1,  # 99 outputs + manifest
           f"{count} files per tree")


def test_figure_strips_emitted(tmp_path):
    img_path = tmp_path / "scene.png"
    write_image(demo_image(64, 36, seed=11), img_path)
    pcd_path = tmp_path / "sweep.pcd"
    write_pcd(PcdFile.from_frame(demo_frame(seed=11)), pcd_path)
    out = tmp_path / "figs"
    code_img = main([
        "render", "--input", str(img_path), "--output", str(out),
        "--levels", "0%,30%,60%,100%", "--seed", "1",
    ])
    code_pcd = main([
        "render", "--input", str(pcd_path), "--output", str(out),
        "--levels", "0%,30%,60%,100%", "--seed", "1",
    ])
    strips = sorted(p.name for p in out.glob("*__strip_*.png"))
    ok = (
        code_img == 0
        and code_pcd == 0
        and len([n for n in strips if "strip_bev" not in n]) == 4
        and any("strip_bev" in n for n in strips)
        and all((out / n).stat().st_size > 0 for n in strips)
    )
    report("comparison strips emitted at 0/30/60/100% for all kinds and BEV",
           ok, f"{len(strips)} strips")
