"""Point-scatterer simulation of demodulated scattered-field data cubes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError
from .geometry import AcquisitionSpec, ArrayGeometry

MAX_CUBE_SAMPLES = 1 << 28


@dataclass(frozen=True)
class Scatterer:
    x: float
    y: float
    z: float
    amplitude: complex = 1.0 + 0.0j


@dataclass
class Scene:
    scatterers: list = field(default_factory=list)

    def __post_init__(self):
        for s in self.scatterers:
            if not all(math.isfinite(v) for v in (s.x, s.y, s.z)):
                raise ConfigError(f"non-finite scatterer position {s}")

    @property
    def positions(self) -> np.ndarray:
        return np.array([[s.x, s.y, s.z] for s in self.scatterers], dtype=np.float64).reshape(-1, 3)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([s.amplitude for s in self.scatterers], dtype=np.complex128)

    def __add__(self, other: "Scene") -> "Scene":
        return Scene(list(self.scatterers) + list(other.scatterers))

    def to_dict(self) -> dict:
        return {"scatterers": [
            {"x": s.x, "y": s.y, "z": s.z,
             "amp_re": complex(s.amplitude).real, "amp_im": complex(s.amplitude).imag}
            for s in self.scatterers]}

    @classmethod
    def from_dict(cls, d) -> "Scene":
        items = d["scatterers"] if isinstance(d, dict) else d
        try:
            return cls([Scatterer(float(e["x"]), float(e["y"]), float(e["z"]),
                                  complex(e.get("amp_re", 1.0), e.get("amp_im", 0.0)))
                        for e in items])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed scene: {exc}") from exc

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(doc)


@dataclass(eq=False)
class DataCube:
    """Complex samples indexed ``[channel, scan_index, freq_index]``."""

    samples: np.ndarray
    modality: str
    channels: np.ndarray
    scan_positions: np.ndarray
    freqs: np.ndarray

    def __post_init__(self):
        shape = (len(self.channels), len(self.scan_positions), len(self.freqs))
        if self.samples.shape != shape:
            raise DimensionError(f"samples shape {self.samples.shape} != axes {shape}")

    @property
    def scan_step(self) -> float:
        if len(self.scan_positions) < 2:
            return math.nan
        return float(self.scan_positions[1] - self.scan_positions[0])

    def with_samples(self, samples: np.ndarray) -> "DataCube":
        return DataCube(samples, self.modality, self.channels, self.scan_positions, self.freqs)

    def __add__(self, other: "DataCube") -> "DataCube":
        return self.with_samples(self.samples + other.samples)


def _check(scene: Scene, geom: ArrayGeometry, acq: AcquisitionSpec, modality: str, max_samples: int):
    if geom.modality != modality:
        raise ConfigError(f"geometry is {geom.modality}, expected {modality}")
    if not scene.scatterers:
        raise ConfigError("scene has no scatterers")
    n = geom.num_channels * acq.num_scan_positions * acq.num_freqs
    if n > max_samples:
        raise DimensionError(f"data cube of {n} samples exceeds the limit of {max_samples}")


def _range(xy: np.ndarray, zs: np.ndarray, p: np.ndarray) -> np.ndarray:
    rho2 = (p[0] - xy[:, 0]) ** 2 + (p[1] - xy[:, 1]) ** 2
    return np.sqrt(rho2[:, None] + (p[2] - zs[None, :]) ** 2)


def simulate_monostatic(scene: Scene, geom: ArrayGeometry, acq: AcquisitionSpec,
                        spreading: bool = False, max_samples: int = MAX_CUBE_SAMPLES) -> DataCube:
    """Sum of ``a * exp(-2jkR)`` over scatterers for every (channel, scan, frequency).

    ``spreading=True`` adds a ``1/R**2`` amplitude decay.
    """
    _check(scene, geom, acq, "monostatic", max_samples)
    k = acq.wavenumbers
    zs = acq.scan_positions
    xy = geom.channel_positions()
    out = np.zeros((geom.num_channels, len(zs), len(k)), dtype=np.complex128)
    for p, a in zip(scene.positions, scene.amplitudes):
        R = _range(xy, zs, p)
        w = a / R ** 2 if spreading else np.full(R.shape, a)
        out += w[..., None] * np.exp(-2j * k * R[..., None])
    return DataCube(out, "monostatic", geom.channels, zs, acq.freqs)


def simulate_multistatic(scene: Scene, geom: ArrayGeometry, acq: AcquisitionSpec,
                         spreading: bool = False, max_samples: int = MAX_CUBE_SAMPLES) -> DataCube:
    """Sum of ``a * exp(-jk(R_T + R_R))`` over scatterers.

    ``spreading=True`` adds a ``1/(R_T R_R)`` amplitude decay.
    """
    _check(scene, geom, acq, "multistatic", max_samples)
    k = acq.wavenumbers
    zs = acq.scan_positions
    tx, rx = geom.channel_positions()
    out = np.zeros((geom.num_channels, len(zs), len(k)), dtype=np.complex128)
    for p, a in zip(scene.positions, scene.amplitudes):
        RT = _range(tx, zs, p)
        RR = _range(rx, zs, p)
        w = a / (RT * RR) if spreading else np.full(RT.shape, a)
        out += w[..., None] * np.exp(-1j * k * (RT + RR)[..., None])
    return DataCube(out, "multistatic", geom.channels, zs, acq.freqs)


def simulate(scene: Scene, geom: ArrayGeometry, acq: AcquisitionSpec, **kw) -> DataCube:
    if geom.modality == "monostatic":
        return simulate_monostatic(scene, geom, acq, **kw)
    return simulate_multistatic(scene, geom, acq, **kw)


def add_noise(cube: DataCube, snr_db: float, seed: int) -> DataCube:
    """Add circular white Gaussian noise at ``snr_db`` relative to the cube's mean power."""
    if math.isinf(snr_db) and snr_db > 0:
        return cube.with_samples(cube.samples.copy())
    if math.isnan(snr_db):
        raise ConfigError("snr_db is NaN")
    rng = np.random.default_rng(seed)
    power = np.mean(np.abs(cube.samples) ** 2)
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0) / 2.0)
    noise = rng.standard_normal(cube.samples.shape) + 1j * rng.standard_normal(cube.samples.shape)
    return cube.with_samples(cube.samples + sigma * noise)
