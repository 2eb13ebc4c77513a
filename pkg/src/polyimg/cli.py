"""Command-line front end: design, simulate, reconstruct, metrics, export, bench.

Exit codes: 0 ok, 2 configuration, 3 file I/O, 4 dimension mismatch, 5 numeric.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bench as _bench
from . import plotting
from .container import atomic_write, load_datacube, load_image, save_datacube, save_image
from .errors import ConfigError, NumericError, PolyimgError
from .forward import Scene, add_noise, simulate
from .geometry import (AcquisitionSpec, ArrayGeometry, PolylineSpec, build_polyline,
                       check_sampling, predict_resolutions)
from .metrics import AXES, axis_cuts, psf_analyze, to_db_normalized
from .presets import (REFERENCE_ACQUISITION, TARGET_DIMENSION, five_point_scene, polyline_preset,
                      psf_grid, scene_grid)
from .recon import ALGORITHMS, ImageGrid, reconstruct

log = logging.getLogger("polyimg")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DIMENSION, EXIT_NUMERIC = 0, 2, 3, 4, 5


def _read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _finite(obj):
    # strict JSON has no NaN/inf; emit null instead
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(obj, out) -> None:
    if out:
        atomic_write(out, _dumps(obj).encode("utf-8"))
    else:
        sys.stdout.write(_dumps(obj))


# ---------------------------------------------------------------- design

def design_document(spec: PolylineSpec, acq: AcquisitionSpec,
                    target_dimension: float = TARGET_DIMENSION, theta_z=None) -> dict:
    geom = build_polyline(spec)
    return {
        "geometry": geom.to_dict(),
        "acquisition": acq.to_dict(),
        "sampling": check_sampling(geom, acq, target_dimension, theta_z).to_dict(),
        "resolution": predict_resolutions(geom, acq, theta_z).to_dict(),
    }


def cmd_design(args) -> int:
    if args.config:
        cfg = _read_json(args.config)
        if not isinstance(cfg, dict) or "array" not in cfg:
            raise ConfigError("design config needs an 'array' object")
        spec = PolylineSpec.from_dict(cfg["array"])
        acq = AcquisitionSpec.from_dict(cfg.get("acquisition", REFERENCE_ACQUISITION.to_dict()))
        target = float(cfg.get("target_dimension", TARGET_DIMENSION))
        theta_z = cfg.get("theta_z")
    else:
        spec, acq, target, theta_z = polyline_preset(args.preset), REFERENCE_ACQUISITION, TARGET_DIMENSION, None
    doc = design_document(spec, acq, target, theta_z)
    _emit(doc, args.out)
    s = doc["sampling"]
    log.info("channels=%d sampling_ok=%s rx_bound=%.4g m vertical_bound=%.4g m",
             len(doc["geometry"]["channels"]), s["ok"], s["rx_spacing_bound"],
             s["vertical_step_bound"])
    return EXIT_OK


def _load_design(path):
    doc = _read_json(path)
    try:
        return ArrayGeometry.from_dict(doc["geometry"]), AcquisitionSpec.from_dict(doc["acquisition"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: not a design document ({exc})") from exc


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    geom, acq = _load_design(args.geometry)
    scene = Scene.load(args.scene) if args.scene else five_point_scene()
    cube = simulate(scene, geom, acq, spreading=args.spreading)
    cube = add_noise(cube, args.snr, args.seed)
    save_datacube(args.out, cube, geom, acq,
                  {"scatterers": len(scene.scatterers), "snr_db": args.snr, "seed": args.seed,
                   "spreading": args.spreading})
    return EXIT_OK


# ---------------------------------------------------------------- reconstruct

GRID_PRESETS = {"psf": lambda n: psf_grid(n), "scene": lambda n: scene_grid(),
                "bench": lambda n: _bench.bench_grid()}


def cmd_reconstruct(args) -> int:
    cube, geom, acq = load_datacube(args.data)
    if args.grid:
        grid = ImageGrid.from_dict(_read_json(args.grid))
    else:
        grid = GRID_PRESETS[args.grid_preset](args.size)
    img = reconstruct(cube, geom, acq, grid, args.algo, pad_factor=args.pad_factor,
                      window=args.window, l_oversample=args.l_oversample)
    save_image(args.out, img)
    return EXIT_OK


# ---------------------------------------------------------------- metrics

def _parse_point(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r}") from exc
    if len(vals) != 3:
        raise ConfigError("a point needs three comma-separated coordinates")
    return tuple(vals)


def cmd_metrics(args) -> int:
    img = load_image(args.image)
    truth = _parse_point(args.truth) if args.truth else None
    rep = psf_analyze(img, truth, floor_db=args.floor_db)
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- export

def projection(img, axis: str, db_range: float):
    """Max-intensity projection along ``axis`` in dB, plus the remaining axes' names."""
    ax = AXES.index(axis)
    db = to_db_normalized(np.abs(img.values).max(axis=ax), -db_range)
    rest = [a for a in AXES if a != axis]
    return db, rest


def pgm_bytes(db: np.ndarray, db_range: float) -> bytes:
    """Binary 8-bit PGM with columns along the first image axis and rows running top-down."""
    grey = np.rint((np.clip(db, -db_range, 0.0) + db_range) * (255.0 / db_range)).astype(np.uint8)
    rows = grey.T[::-1]
    h, w = rows.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + rows.tobytes()


def cuts_csv(img) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "coordinate_m", "magnitude", "normalized_db"])
    cuts = axis_cuts(img)
    peak = max(float(m.max()) for _, m in cuts.values())
    for name, (coords, mag) in cuts.items():
        for c, m in zip(coords, mag):
            db = 20.0 * math.log10(m / peak) if m > 0 else -math.inf
            w.writerow([name, repr(float(c)), repr(float(m)), repr(db)])
    return buf.getvalue()


def cmd_export(args) -> int:
    img = load_image(args.image)
    if not np.abs(img.values).max() > 0:
        raise NumericError("cannot export an all-zero image")
    if not args.db_range > 0:
        raise ConfigError("db range must be positive")
    prefix = Path(args.out)
    db, rest = projection(img, args.axis, args.db_range)
    atomic_write(prefix.with_suffix(".pgm"), pgm_bytes(db, args.db_range))
    atomic_write(Path(f"{prefix}_cuts.csv"), cuts_csv(img).encode("utf-8"))
    if not args.no_figures:
        axes = {a: getattr(img.grid, a).values for a in AXES}
        u, v = axes[rest[0]], axes[rest[1]]
        extent = [u[0] * 100, u[-1] * 100, v[0] * 100, v[-1] * 100]
        plotting.plot_projection(db, extent, [f"{rest[0]} (cm)", f"{rest[1]} (cm)"],
                                 prefix.with_suffix(".png"), args.db_range)
        plotting.plot_cuts(axis_cuts(img), Path(f"{prefix}_cuts.png"))
    return EXIT_OK


# ---------------------------------------------------------------- bench

def cmd_bench(args) -> int:
    mods = ["monostatic", "multistatic"] if args.modality == "both" else [args.modality]
    grid = ImageGrid.from_dict(_read_json(args.grid)) if args.grid else _bench.bench_grid()
    acq = REFERENCE_ACQUISITION
    if args.scan_positions:
        acq = AcquisitionSpec.from_dict({**acq.to_dict(), "num_scan_positions": args.scan_positions})
    records = []
    for m in mods:
        records += _bench.run_bench(m, grid, acq, args.repeats, tuple(args.algorithms))
    out = Path(args.out)
    _bench.write_csv(records, out)
    if not args.no_figures:
        plotting.plot_bench(records, out.with_suffix(".png"))
    for r in records:
        log.info("%s %s %.3f s (x%.1f vs direct_bp)", r.modality, r.algorithm, r.wall_time,
                 r.ratio_vs_direct_bp)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyimg", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="build an array and report sampling/resolution")
    g = d.add_mutually_exclusive_group()
    g.add_argument("--config", help="JSON with 'array', optional 'acquisition', 'target_dimension'")
    g.add_argument("--preset", choices=["monostatic", "multistatic"], default="monostatic")
    d.add_argument("--out", help="output JSON (stdout if omitted)")
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="point-scatterer data cube")
    s.add_argument("--geometry", required=True, help="design document from 'design'")
    s.add_argument("--scene", help="scene JSON (default: five-point scene)")
    s.add_argument("--snr", type=float, default=math.inf, help="SNR in dB (default: noiseless)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--spreading", action="store_true", help="include free-space amplitude decay")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reconstruct", help="form an image from a data cube")
    r.add_argument("--data", required=True)
    r.add_argument("--algo", choices=ALGORITHMS, default="omegak_nufft_bp")
    r.add_argument("--grid", help="image grid JSON {x,y,z: {start, step, count}}")
    r.add_argument("--grid-preset", choices=sorted(GRID_PRESETS), default="scene")
    r.add_argument("--size", type=int, default=64, help="samples per axis for the psf preset")
    r.add_argument("--pad-factor", type=int, default=2)
    r.add_argument("--window", choices=["none", "hann"], default="none")
    r.add_argument("--l-oversample", type=float, default=16.0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reconstruct)

    m = sub.add_parser("metrics", help="PSF report as JSON")
    m.add_argument("--image", required=True)
    m.add_argument("--truth", help="expected peak 'x,y,z' in metres")
    m.add_argument("--floor-db", type=float, default=-40.0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_metrics)

    e = sub.add_parser("export", help="PGM projection, CSV cuts and PNG figures")
    e.add_argument("--image", required=True)
    e.add_argument("--axis", choices=list(AXES), default="y", help="projection axis")
    e.add_argument("--db-range", type=float, default=20.0)
    e.add_argument("--out", required=True, help="output prefix")
    e.add_argument("--no-figures", action="store_true")
    e.set_defaults(func=cmd_export)

    b = sub.add_parser("bench", help="time the three algorithms")
    b.add_argument("--modality", choices=["monostatic", "multistatic", "both"], default="both")
    b.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    b.add_argument("--grid", help="image grid JSON (default: 16x16x32 around the centre)")
    b.add_argument("--scan-positions", type=int)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--out", required=True, help="CSV path; the PNG goes alongside")
    b.add_argument("--no-figures", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except PolyimgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
