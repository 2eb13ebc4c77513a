"""Image formation: wavenumber/back-projection hybrid (NUFFT or direct sums) and plain BP.

The hybrid path transforms the scan axis to kz, range-compresses every
channel with ``q(l, kz) = sum_k S(kz, k) k dk exp(+j k_rho' l)``, back-projects
``q`` along each channel's horizontal distance with the carrier
``exp(+j k_rho0 rho)`` restored, and finally inverse-transforms over kz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ConfigError, CoverageError, DimensionError
from .forward import DataCube
from .geometry import AcquisitionSpec, ArrayGeometry, ResolutionReport, predict_resolutions
from .nufft import direct_nudft, execute, plan
from .spectral import DispersionGrid, SpectralCube, dispersion, fft_along_scan

ALGORITHMS = ("omegak_nufft_bp", "omegak_bp", "direct_bp")
ENGINES = ("nufft", "direct_interp")


@dataclass(frozen=True)
class Axis:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ConfigError("axis count must be a positive integer")
        if not self.step > 0:
            raise ConfigError("axis step must be positive")

    @property
    def values(self) -> np.ndarray:
        return self.start + np.arange(self.count) * self.step

    @classmethod
    def centered(cls, center: float, step: float, count: int) -> "Axis":
        return cls(center - (count - 1) / 2.0 * step, step, count)

    def to_dict(self) -> dict:
        return {"start": self.start, "step": self.step, "count": self.count}


@dataclass(frozen=True)
class ImageGrid:
    x: Axis
    y: Axis
    z: Axis

    @property
    def shape(self) -> tuple:
        return (self.x.count, self.y.count, self.z.count)

    @property
    def spacing(self) -> tuple:
        return (self.x.step, self.y.step, self.z.step)

    def to_dict(self) -> dict:
        return {"x": self.x.to_dict(), "y": self.y.to_dict(), "z": self.z.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ImageGrid":
        try:
            return cls(*(Axis(float(d[a]["start"]), float(d[a]["step"]), int(d[a]["count"]))
                         for a in "xyz"))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed image grid: {exc}") from exc

    def check_resolution(self, res: ResolutionReport) -> list:
        """Warn for every axis whose spacing exceeds half the predicted resolution."""
        msgs = []
        for name, step, delta in zip("xyz", self.spacing, (res.delta_x, res.delta_y, res.delta_z)):
            if step > delta / 2.0 + 1e-12:
                msgs.append(f"{name} spacing {step:.4g} m exceeds half the predicted resolution {delta:.4g} m")
        for m in msgs:
            warnings.warn(m, stacklevel=3)
        return msgs


@dataclass(eq=False)
class ImageVolume:
    """Complex reflectivity on an :class:`ImageGrid`, indexed ``[ix, iy, iz]``."""

    values: np.ndarray
    grid: ImageGrid
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise DimensionError(f"image shape {self.values.shape} != grid {self.grid.shape}")

    def __add__(self, other: "ImageVolume") -> "ImageVolume":
        return ImageVolume(self.values + other.values, self.grid, dict(self.provenance))


@dataclass(frozen=True)
class LGrid:
    """Uniform range-profile axis ``l_i = start + i * step``."""

    start: float
    step: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return self.start + np.arange(self.count) * self.step

    @property
    def stop(self) -> float:
        return self.start + (self.count - 1) * self.step


@dataclass(eq=False)
class FilteredProfileSet:
    """Range profiles ``q[c, j, i]`` for kz rows ``kz_index[j]`` on ``l_grid``."""

    profiles: np.ndarray
    kz_index: np.ndarray
    l_grid: LGrid
    modality: str


def _channel_phase_centres(geom: ArrayGeometry):
    if geom.modality == "monostatic":
        p = np.ascontiguousarray(geom.channel_positions())
        return p, p, 0.5
    tx, rx = geom.channel_positions()
    return np.ascontiguousarray(tx), np.ascontiguousarray(rx), 1.0


def channel_distances(geom: ArrayGeometry, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Horizontal path variable per (channel, x, y): ``rho`` or ``rho_T + rho_R``."""
    tx, rx, scale = _channel_phase_centres(geom)
    X = xs[None, :, None]
    Y = ys[None, None, :]
    dt = np.hypot(X - tx[:, 0, None, None], Y - tx[:, 1, None, None])
    dr = np.hypot(X - rx[:, 0, None, None], Y - rx[:, 1, None, None])
    return scale * (dt + dr)


def distance_range(geom: ArrayGeometry, grid: ImageGrid) -> tuple:
    d = channel_distances(geom, grid.x.values, grid.y.values)
    return float(d.min()), float(d.max())


def make_l_grid(disp: DispersionGrid, geom: ArrayGeometry, grid: ImageGrid,
                oversample: float = 16.0, margin: int = 8) -> LGrid:
    """Profile axis covering every pixel/channel distance.

    The step is ``2 pi / (span(k_rho') * oversample)`` so linear interpolation
    of the baseband profile stays accurate.
    """
    if oversample < 4:
        raise ConfigError("l-grid oversampling must be >= 4")
    span = float(disp.k_rho_prime.max())
    if span <= 0:
        raise ConfigError("degenerate k_rho' span")
    dl = 2.0 * math.pi / (span * oversample)
    lo, hi = distance_range(geom, grid)
    start = lo - margin * dl
    count = int(math.ceil((hi - lo) / dl)) + 2 * margin + 1
    return LGrid(start, dl, count)


def check_coverage(l_grid: LGrid, required: tuple) -> None:
    lo, hi = required
    short_lo = l_grid.start - lo
    short_hi = hi - (l_grid.stop - l_grid.step)
    if short_lo > 0 or short_hi > 0:
        raise CoverageError(
            f"profile grid [{l_grid.start:.6g}, {l_grid.stop:.6g}] m misses required "
            f"[{lo:.6g}, {hi:.6g}] m (short by {max(short_lo, 0):.3g} m below, "
            f"{max(short_hi, 0):.3g} m above)")


def quadrature_weights(k: np.ndarray, rule: str = "left") -> np.ndarray:
    """``k_n * dk`` weights of the ``k dk`` integral."""
    dk = k[1] - k[0]
    w = k * dk
    if rule == "trapezoid":
        w = w.copy()
        w[[0, -1]] *= 0.5
    elif rule != "left":
        raise ConfigError(f"unknown quadrature rule {rule!r}")
    return w


def filter_profiles(spec_cube: SpectralCube, disp: DispersionGrid, l_grid: LGrid,
                    engine: str = "nufft", kz_index=None, required_range: Optional[tuple] = None,
                    quadrature: str = "left", sigma: float = 2.0, width: int = 12) -> FilteredProfileSet:
    """Range-compress each channel for the selected kz rows.

    ``engine="nufft"`` builds one plan per kz row and applies it to all
    channels at once; ``engine="direct_interp"`` evaluates the literal sum
    channel by channel.  Evanescent (kz, k) samples are dropped.
    """
    if engine not in ENGINES:
        raise ConfigError(f"unknown engine {engine!r}")
    if disp.k_rho.shape != spec_cube.samples.shape[1:]:
        raise DimensionError("dispersion grid does not match the spectral cube axes")
    if required_range is not None:
        check_coverage(l_grid, required_range)
    if kz_index is None:
        kz_index = np.arange(len(disp.kz))
    kz_index = np.asarray(kz_index, dtype=np.int64)
    weights = quadrature_weights(disp.k, quadrature)
    n_ch = spec_cube.samples.shape[0]
    out = np.zeros((n_ch, len(kz_index), l_grid.count), dtype=np.complex128)
    for j, p in enumerate(kz_index):
        keep = ~disp.evanescent[p]
        if not keep.any():
            continue
        nodes = disp.k_rho_prime[p, keep]
        coeffs = spec_cube.samples[:, p, keep] * weights[keep]
        if engine == "nufft":
            pl = plan(nodes, l_grid.count, l_grid.step, l_grid.start, sigma, width)
            out[:, j, :] = execute(pl, coeffs)
        else:
            for c in range(n_ch):
                out[c, j, :] = direct_nudft(nodes, coeffs[c], l_grid.count, l_grid.step, l_grid.start)
    return FilteredProfileSet(out, kz_index, l_grid, spec_cube.modality)


def backproject(profiles: FilteredProfileSet, geom: ArrayGeometry, disp: DispersionGrid,
                grid: ImageGrid, out: Optional[np.ndarray] = None) -> np.ndarray:
    """Accumulate ``q_c(rho_c, kz) exp(+j k_rho0 rho_c)`` over channels.

    Returns ``g[ix, iy, j]`` for the profile set's kz rows.  Distances that
    fall outside the profile grid contribute nothing.
    """
    tx, rx, scale = _channel_phase_centres(geom)
    q = np.ascontiguousarray(profiles.profiles.transpose(0, 2, 1))
    if q.shape[0] != len(tx):
        raise DimensionError("profile set and geometry disagree on the channel count")
    shape = (grid.x.count, grid.y.count, len(profiles.kz_index))
    if out is None:
        out = np.zeros(shape, dtype=np.complex128)
    elif out.shape != shape:
        raise DimensionError(f"output buffer {out.shape} != {shape}")
    krho0 = np.ascontiguousarray(disp.k_rho0[profiles.kz_index])
    lg = profiles.l_grid
    _kernels.backproject_kernel(q, tx, rx, scale, grid.x.values, grid.y.values,
                                krho0, lg.start, lg.step, out)
    return out


def finalize_ifft_kz(g_kz: np.ndarray, kz: np.ndarray, grid: ImageGrid,
                     provenance: Optional[dict] = None) -> ImageVolume:
    """Inverse transform ``g(x, y, kz)`` over kz and crop to the grid's z axis.

    The kz axis is ascending with spacing ``dkz``; its sample period
    ``2 pi / (n * dkz)`` must be an integer multiple ``u`` of the grid's z
    step, in which case the spectrum is zero-extended by ``u``.
    """
    n = len(kz)
    if g_kz.shape != (grid.x.count, grid.y.count, n):
        raise DimensionError(f"kz stack {g_kz.shape} does not match grid/kz axes")
    dkz = kz[1] - kz[0]
    dz_native = 2.0 * math.pi / (n * dkz)
    ratio = dz_native / grid.z.step
    u = int(round(ratio))
    if u < 1 or abs(ratio - u) > 1e-6 * ratio:
        raise DimensionError(
            f"z step {grid.z.step:.6g} m must divide the scan step {dz_native:.6g} m")
    n_tot = n * u
    offset = grid.z.start / grid.z.step
    j0 = int(round(offset))
    if abs(offset - j0) > 1e-6 * max(1.0, abs(offset)):
        raise DimensionError("z axis start must lie on a multiple of the z step")
    if grid.z.count > n_tot:
        raise DimensionError(f"z axis of {grid.z.count} samples exceeds the {n_tot}-sample period")
    spec = np.fft.ifftshift(g_kz, axes=2)
    half = n // 2
    full = np.zeros(g_kz.shape[:2] + (n_tot,), dtype=np.complex128)
    full[:, :, :half] = spec[:, :, :half]
    full[:, :, n_tot - (n - half):] = spec[:, :, half:]
    img = np.fft.ifft(full, axis=2) * (n_tot * dkz / (2.0 * math.pi))
    idx = np.mod(j0 + np.arange(grid.z.count), n_tot)
    return ImageVolume(img[:, :, idx], grid, dict(provenance or {}))


def _prepare(cube: DataCube, geom: ArrayGeometry, acq: AcquisitionSpec) -> None:
    if cube.modality != geom.modality:
        raise ConfigError(f"cube is {cube.modality} but geometry is {geom.modality}")
    expect = (geom.num_channels, acq.num_scan_positions, acq.num_freqs)
    if cube.samples.shape != expect:
        raise DimensionError(f"cube shape {cube.samples.shape} != geometry/acquisition {expect}")


def direct_bp(cube: DataCube, geom: ArrayGeometry, acq: AcquisitionSpec, grid: ImageGrid) -> np.ndarray:
    """Voxel-by-voxel matched filter straight from the (z', k) samples.

    Each sample is weighted by ``k dk dz'`` to mirror the wavenumber path.
    """
    k = acq.wavenumbers
    w = quadrature_weights(k) * acq.scan_step
    s = np.ascontiguousarray(cube.samples * w[None, None, :], dtype=np.complex128)
    tx, rx, _ = _channel_phase_centres(geom)
    out = np.zeros(grid.shape, dtype=np.complex128)
    _kernels.direct_bp_kernel(s, tx, rx, np.ascontiguousarray(cube.scan_positions, dtype=np.float64),
                              float(k[0]), float(k[1] - k[0]),
                              grid.x.values, grid.y.values, grid.z.values, out)
    return out


def reconstruct(cube: DataCube, geom: ArrayGeometry, acq: AcquisitionSpec, grid: ImageGrid,
                algo: str = "omegak_nufft_bp", *, pad_factor: int = 2, window: str = "none",
                l_oversample: float = 16.0, margin: int = 8, quadrature: str = "left",
                sigma: float = 2.0, width: int = 12, kz_chunk: int = 32,
                check_grid: bool = True) -> ImageVolume:
    """Form a complex image with one of ``omegak_nufft_bp``, ``omegak_bp`` or ``direct_bp``."""
    if algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algo!r}")
    _prepare(cube, geom, acq)
    if check_grid:
        grid.check_resolution(predict_resolutions(geom, acq))
    provenance = {
        "algorithm": algo,
        "modality": geom.modality,
        "geometry": geom.digest(),
        "acquisition": acq.digest(),
    }
    if algo == "direct_bp":
        return ImageVolume(direct_bp(cube, geom, acq, grid), grid, provenance)

    engine = "nufft" if algo == "omegak_nufft_bp" else "direct_interp"
    spec = fft_along_scan(cube, pad_factor, window)
    disp = dispersion(geom.modality, spec.kz, spec.wavenumbers)
    lg = make_l_grid(disp, geom, grid, l_oversample, margin)
    check_coverage(lg, distance_range(geom, grid))
    provenance.update(pad_factor=pad_factor, window=window, l_step=lg.step, l_count=lg.count,
                      quadrature=quadrature, engine=engine)
    if engine == "nufft":
        provenance.update(nufft_sigma=sigma, nufft_width=width)

    g_kz = np.zeros((grid.x.count, grid.y.count, len(spec.kz)), dtype=np.complex128)
    for j0 in range(0, len(spec.kz), kz_chunk):
        rows = np.arange(j0, min(j0 + kz_chunk, len(spec.kz)))
        prof = filter_profiles(spec, disp, lg, engine, rows, quadrature=quadrature,
                               sigma=sigma, width=width)
        g_kz[:, :, rows] = backproject(prof, geom, disp, grid)
    return finalize_ifft_kz(g_kz, spec.kz, grid, provenance)
