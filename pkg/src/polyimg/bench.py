"""Wall-clock comparison of the three reconstruction algorithms."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import asdict, dataclass, fields

from . import _kernels
from .container import atomic_write
from .errors import ConfigError
from .forward import simulate
from .geometry import AcquisitionSpec, build_polyline
from .presets import REFERENCE_ACQUISITION, point_scene, polyline_preset
from .recon import ALGORITHMS, Axis, ImageGrid, reconstruct


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    modality: str
    num_channels: int
    num_scan_positions: int
    num_freqs: int
    grid_shape: str
    repeats: int
    wall_time: float
    ratio_vs_direct_bp: float

    def __post_init__(self):
        if not self.wall_time > 0:
            raise ConfigError("wall time must be positive")


def bench_grid(nx: int = 16, ny: int = 16, nz: int = 32) -> ImageGrid:
    """Small grid around the scene centre; the z count matters most for the speed-up."""
    return ImageGrid(Axis(-(nx // 2) * 0.002, 0.002, nx), Axis(-(ny // 2) * 0.004, 0.004, ny),
                     Axis(-(nz // 2) * 0.0025, 0.0025, nz))


def _time(fn, repeats: int) -> float:
    ts = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return statistics.median(ts)


def run_bench(modality: str, grid: ImageGrid | None = None,
              acq: AcquisitionSpec = REFERENCE_ACQUISITION, repeats: int = 3,
              algorithms=ALGORITHMS) -> list:
    """Median wall time of each algorithm on one point target.

    Compiled kernels are warmed up first so JIT time is excluded.  The ratio
    column is ``t(direct_bp) / t(algorithm)`` when direct BP is timed.
    """
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    unknown = set(algorithms) - set(ALGORITHMS)
    if unknown:
        raise ConfigError(f"unknown algorithms {sorted(unknown)}")
    grid = grid or bench_grid()
    geom = build_polyline(polyline_preset(modality))
    cube = simulate(point_scene(), geom, acq)
    _kernels.warmup()
    times = {}
    for algo in algorithms:
        times[algo] = _time(lambda: reconstruct(cube, geom, acq, grid, algo, check_grid=False),
                            repeats)
    ref = times.get("direct_bp")
    shape = "x".join(str(n) for n in grid.shape)
    return [BenchRecord(algo, modality, geom.num_channels, acq.num_scan_positions, acq.num_freqs,
                        shape, repeats, t, ref / t if ref else float("nan"))
            for algo, t in times.items()]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=[f.name for f in fields(BenchRecord)], lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(asdict(r))
    return buf.getvalue()


def write_csv(records, path) -> None:
    atomic_write(path, records_to_csv(records).encode("utf-8"))
