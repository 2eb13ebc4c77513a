"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary block at the end
of the session lists every criterion.
"""

import dataclasses
import math
import time
import warnings

import numpy as np
import pytest

from polyimg import bench
from polyimg.cli import main
from polyimg.container import decode, encode
from polyimg.forward import simulate
from polyimg.geometry import build_polyline, check_sampling, predict_resolutions
from polyimg.metrics import image_similarity, parabolic_offset, psf_analyze
from polyimg.nufft import direct_nudft, execute, plan
from polyimg.presets import (REFERENCE_ACQUISITION, REFERENCE_MULTISTATIC, five_point_scene,
                             point_scene, polyline_preset, psf_grid)
from polyimg.recon import Axis, ImageGrid, reconstruct

RESULTS = []
LABEL = {"monostatic": "mono", "multistatic": "multi"}

ACQ = REFERENCE_ACQUISITION
SCENE_GRID = ImageGrid(Axis(-0.12, 0.005, 49), Axis(-0.02, 0.01, 5), Axis(-0.12, 0.005, 49))
CUT_GRID = ImageGrid(Axis(-0.1, 0.001, 201), Axis(0.0, 0.01, 1), Axis(0.0, 0.00125, 1))
ALIAS_GRID = ImageGrid(Axis(-0.6, 0.002, 601), Axis(-0.2, 0.01, 41), Axis(0.0, 0.00125, 1))


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def geoms():
    return {m: build_polyline(polyline_preset(m)) for m in ("monostatic", "multistatic")}


@pytest.fixture(scope="module")
def psf(geoms):
    """64^3 point-target reconstructions at the scene centre, with wall times."""
    out = {}
    for m, g in geoms.items():
        cube = simulate(point_scene(), g, ACQ)
        reconstruct(cube, g, ACQ, ImageGrid(Axis(0, 0.001, 2), Axis(0, 0.002, 2),
                                            Axis(0, 0.00125, 2)), check_grid=False)  # JIT warm-up
        t0 = time.perf_counter()
        img = reconstruct(cube, g, ACQ, psf_grid(64))
        out[m] = (img, time.perf_counter() - t0)
    return out


def test_criterion_1_nufft_accuracy():
    rng = np.random.default_rng(2024)
    dl = 0.002
    nodes = rng.uniform(-math.pi / dl, math.pi / dl, 256)
    c = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    c /= np.linalg.norm(c)
    t0 = time.perf_counter()
    q = execute(plan(nodes, 256, dl, 0.3, sigma=2.0, width=12), c)
    elapsed = time.perf_counter() - t0
    err = float(np.abs(q - direct_nudft(nodes, c, 256, dl, 0.3)).max())
    report(1, err <= 1e-6 and elapsed < 1.0, f"max abs error {err:.2e} (<= 1e-6), {elapsed:.3f} s (< 1 s)")


def test_criterion_2_downrange_resolution(psf, geoms):
    img, elapsed = psf["monostatic"]
    w = psf_analyze(img, (0, 0, 0)).width("y")
    ratio = w / 0.02998
    report(2, abs(ratio - 1) <= 0.20 and elapsed < 60,
           f"y width {w * 100:.3f} cm vs 2.998 cm (ratio {ratio:.3f}, +-20%), 64^3 in {elapsed:.1f} s (< 60 s)")


def test_criterion_3_cross_range_resolution(psf, geoms):
    parts, ok = [], True
    for m, g in geoms.items():
        rep = psf_analyze(psf[m][0], (0, 0, 0))
        pred = predict_resolutions(g, ACQ)
        for ax, delta in (("x", pred.delta_x), ("z", pred.delta_z)):
            r = rep.width(ax) / delta
            ok &= abs(r - 1) <= 0.25
            parts.append(f"{LABEL[m]} {ax} {rep.width(ax) * 1e3:.2f}/{delta * 1e3:.2f} mm ({r:.3f})")
    report(3, ok, "; ".join(parts) + " (+-25%)")


def _local_peaks(img, scene):
    """Sub-voxel peak position near every scatterer."""
    a = np.abs(img.values)
    axes = (img.grid.x, img.grid.y, img.grid.z)
    out = []
    for p in scene.positions:
        centre = [int(round((v - ax.start) / ax.step)) for v, ax in zip(p, axes)]
        sl = tuple(slice(max(c - 3, 0), c + 4) for c in centre)
        win = a[sl]
        idx = np.unravel_index(np.argmax(win), win.shape)
        idx = [i + s.start for i, s in zip(idx, sl)]
        pos = []
        for d, ax in enumerate(axes):
            line = list(idx)
            i = idx[d]
            off = 0.0
            if 0 < i < ax.count - 1:
                line[d] = slice(i - 1, i + 2)
                off = parabolic_offset(*a[tuple(line)])
            pos.append(ax.start + (i + off) * ax.step)
        out.append(pos)
    return np.array(out)


@pytest.fixture(scope="module")
def scene_images(geoms):
    scene = five_point_scene()
    out = {}
    for m, g in geoms.items():
        cube = simulate(scene, g, ACQ)
        for algo in ("omegak_nufft_bp", "omegak_bp", "direct_bp"):
            out[m, algo] = reconstruct(cube, g, ACQ, SCENE_GRID, algo, check_grid=False)
    return scene, out


def test_criterion_4_algorithm_equivalence(scene_images):
    scene, imgs = scene_images
    half = np.array(SCENE_GRID.spacing) / 2
    parts, ok = [], True
    for m in ("monostatic", "multistatic"):
        nu = imgs[m, "omegak_nufft_bp"]
        ncc = image_similarity(nu, imgs[m, "direct_bp"])["ncc"]
        shift = np.abs(_local_peaks(nu, scene) - _local_peaks(imgs[m, "direct_bp"], scene))
        peaks_ok = bool(np.all(shift <= half))
        ddb = image_similarity(nu, imgs[m, "omegak_bp"])["max_abs_diff_db"]
        ok &= ncc >= 0.95 and peaks_ok and ddb <= 0.5
        parts.append(f"{LABEL[m]} ncc {ncc:.5f} peaks {'ok' if peaks_ok else 'moved'} "
                     f"dB diff vs omegak_bp {ddb:.1e}")
    report(4, ok, "; ".join(parts) + " (ncc >= 0.95, <= half voxel, <= 0.5 dB)")


def test_criterion_5_multistatic_psf(psf, geoms):
    img = psf["multistatic"][0]
    rep = psf_analyze(img, (0, 0, 0))
    half = np.array(img.grid.spacing) / 2
    off_ok = bool(np.all(np.abs(rep.peak_offset) <= half))
    pred = predict_resolutions(geoms["multistatic"], ACQ)
    ratios = [rep.width(a) / d for a, d in zip("xyz", (pred.delta_x, pred.delta_y, pred.delta_z))]
    ok = off_ok and all(abs(r - 1) <= 0.25 for r in ratios)
    report(5, ok, f"peak offset (mm) {tuple(round(o * 1e3, 3) for o in rep.peak_offset)}, "
                  f"width ratios x/y/z {ratios[0]:.3f}/{ratios[1]:.3f}/{ratios[2]:.3f} (+-25%)")


def test_criterion_6_sidelobe_ordering(geoms):
    level = {}
    for m, g in geoms.items():
        cube = simulate(point_scene(), g, ACQ)
        img = reconstruct(cube, g, ACQ, CUT_GRID, check_grid=False)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dx = predict_resolutions(g, ACQ).delta_x
            level[m] = psf_analyze(img, (0, 0, 0), exclusion=(2 * dx,) * 3).mean_sidelobe_db[0]
    ok = level["multistatic"] <= level["monostatic"]
    report(6, ok, f"mean x-cut sidelobe outside 2 dx, within +-10 cm: multi {level['multistatic']:.2f} dB, "
                  f"mono {level['monostatic']:.2f} dB (multi <= mono)")


def test_criterion_7_performance():
    grid = bench.bench_grid()
    parts, ok = [], True
    for m in ("monostatic", "multistatic"):
        recs = {r.algorithm: r for r in bench.run_bench(m, grid, ACQ, repeats=1)}
        t = {a: r.wall_time for a, r in recs.items()}
        vs_interp = t["omegak_bp"] / t["omegak_nufft_bp"]
        vs_bp = t["direct_bp"] / t["omegak_nufft_bp"]
        ok &= t["omegak_nufft_bp"] < t["omegak_bp"] < t["direct_bp"] and vs_interp >= 5 and vs_bp >= 20
        parts.append(f"{LABEL[m]} {t['omegak_nufft_bp']:.2f}/{t['omegak_bp']:.2f}/{t['direct_bp']:.2f} s "
                     f"(x{vs_interp:.1f}, x{vs_bp:.1f})")
    report(7, ok, "; ".join(parts) + f" on {'x'.join(map(str, grid.shape))} (>= 5x, >= 20x)")


def _alias_level(spec):
    g = build_polyline(spec)
    img = reconstruct(simulate(point_scene(), g, ACQ), g, ACQ, ALIAS_GRID, check_grid=False)
    a = np.abs(img.values[:, :, 0])
    db = 20 * np.log10(a / a.max() + 1e-30)
    far = np.abs(ALIAS_GRID.x.values) > 0.1
    return float(db[far].max()), check_sampling(g, ACQ).horizontal_ok


def test_criterion_8_aliasing_lobes():
    compliant, ok_c = _alias_level(REFERENCE_MULTISTATIC)
    doubled_spec = dataclasses.replace(REFERENCE_MULTISTATIC, elements_per_section=10,
                                       element_spacing=2 * REFERENCE_MULTISTATIC.element_spacing)
    doubled, ok_d = _alias_level(doubled_spec)
    assert ok_c and not ok_d
    ok = compliant < -10 and doubled > -10
    report(8, ok, f"largest lobe beyond 10 cm in the horizontal plane: compliant {compliant:.1f} dB "
                  f"(< -10), doubled spacing {doubled:.1f} dB (> -10)")


def test_criterion_9_determinism_and_format(tmp_path):
    def run(tag):
        d = tmp_path / tag
        d.mkdir()
        assert main(["design", "--preset", "multistatic", "--out", str(d / "g.json")]) == 0
        assert main(["simulate", "--geometry", str(d / "g.json"), "--snr", "25", "--seed", "11",
                     "--out", str(d / "c.plsc")]) == 0
        assert main(["reconstruct", "--data", str(d / "c.plsc"), "--grid-preset", "bench",
                     "--out", str(d / "i.plsc")]) == 0
        return [(d / f).read_bytes() for f in ("g.json", "c.plsc", "i.plsc")]

    a, b = run("a"), run("b")
    same = a == b
    exact = True
    for blob in a[1:]:
        header, data = decode(blob)
        again = encode(header["kind"], header["modality"], header["axes"], data,
                       header["provenance"], header["dtype"],
                       {k: v for k, v in header.items()
                        if k not in ("kind", "modality", "axes", "dtype", "provenance")})
        exact &= again == blob
    report(9, same and exact, f"rerun byte-identical: {same}; PLSC decode/encode bit-exact: {exact}")
