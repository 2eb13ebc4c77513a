"""Vertical-scan Fourier transform and the dispersion relations used by the wavenumber path.

Normalisation convention (also written into container headers)::

    S(kz) = dz * sum_m s(z'_m) exp(-j kz z'_m)
    s(z') = dkz / (2 pi) * sum_p S(kz_p) exp(+j kz_p z')

The kz axis is stored centred and ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .forward import DataCube

FORWARD_SCALE = "dz"
INVERSE_SCALE = "dkz/2pi"


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


@dataclass(eq=False)
class SpectralCube:
    """Scan-axis spectrum indexed ``[channel, kz_index, freq_index]``."""

    samples: np.ndarray
    kz: np.ndarray
    modality: str
    channels: np.ndarray
    freqs: np.ndarray
    scan_step: float
    scan_origin: float
    num_scan_positions: int
    pad_factor: int
    window: str = "none"

    @property
    def n_pad(self) -> int:
        return len(self.kz)

    @property
    def dkz(self) -> float:
        return 2.0 * math.pi / (self.n_pad * self.scan_step)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * self.freqs / 299792458.0


def kz_grid(n_pad: int, dz: float) -> np.ndarray:
    return np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(n_pad, dz))


def fft_along_scan(cube: DataCube, pad_factor: int = 2, window: str = "none") -> SpectralCube:
    """Zero-padded DFT of every (channel, frequency) column along the scan axis.

    The padded length is ``pad_factor * next_pow2(num_scan_positions)``.
    ``window="hann"`` tapers the resulting kz spectrum.
    """
    if int(pad_factor) != pad_factor or pad_factor < 1:
        raise ConfigError("pad_factor must be an integer >= 1")
    m = len(cube.scan_positions)
    if m < 2:
        if pad_factor == 1:
            raise DimensionError("a single scan position with pad_factor 1 leaves a degenerate kz axis")
        dz = 1.0
    else:
        dz = cube.scan_step
    n_pad = pad_factor * next_pow2(m)
    kz = kz_grid(n_pad, dz)
    z0 = float(cube.scan_positions[0])
    spec = np.fft.fft(cube.samples, n=n_pad, axis=1)
    spec = np.fft.fftshift(spec, axes=1)
    spec *= (dz * np.exp(-1j * kz * z0))[None, :, None]
    if window == "hann":
        spec *= np.hanning(n_pad)[None, :, None]
    elif window != "none":
        raise ConfigError(f"unknown window {window!r}")
    return SpectralCube(spec, kz, cube.modality, cube.channels, cube.freqs,
                        dz, z0, m, int(pad_factor), window)


def ifft_along_scan(spec: SpectralCube) -> DataCube:
    """Inverse of :func:`fft_along_scan` (pad region stripped, window not undone)."""
    n = spec.n_pad
    centred = spec.samples * np.exp(1j * spec.kz * spec.scan_origin)[None, :, None]
    s = np.fft.ifft(np.fft.ifftshift(centred, axes=1), axis=1) * (n * spec.dkz / (2.0 * np.pi))
    m = spec.num_scan_positions
    z = spec.scan_origin + np.arange(m) * spec.scan_step
    return DataCube(s[:, :m, :], spec.modality, spec.channels, z, spec.freqs)


@dataclass(eq=False)
class DispersionGrid:
    """Radial wavenumbers on the (kz, k) grid.

    ``k_rho`` and ``k_rho_prime`` are zero where ``evanescent`` is set.
    ``k_rho0`` is the radial wavenumber at the lowest k; where even that is
    evanescent it is clamped to zero.
    """

    modality: str
    kz: np.ndarray
    k: np.ndarray
    k_rho: np.ndarray
    k_rho0: np.ndarray
    k_rho_prime: np.ndarray
    evanescent: np.ndarray

    @property
    def evanescent_fraction(self) -> float:
        return float(self.evanescent.mean())


def radicand(modality: str, k, kz):
    k = np.asarray(k, dtype=np.float64)
    kz = np.asarray(kz, dtype=np.float64)
    if modality == "monostatic":
        return 4.0 * k ** 2 - kz ** 2
    if modality == "multistatic":
        return k ** 2 - kz ** 2 / 4.0
    raise ConfigError(f"unknown modality {modality!r}")


def dispersion(modality: str, kz_grid, k_grid) -> DispersionGrid:
    """Evaluate ``k_rho(kz, k)`` for one modality.

    Monostatic: ``sqrt(4 k^2 - kz^2)``.  Multistatic: ``sqrt(k^2 - kz^2 / 4)``.
    """
    kz = np.atleast_1d(np.asarray(kz_grid, dtype=np.float64))
    k = np.atleast_1d(np.asarray(k_grid, dtype=np.float64))
    if kz.size == 0 or k.size == 0:
        raise ConfigError("empty kz or k grid")
    rad = radicand(modality, k[None, :], kz[:, None])
    evanescent = rad < 0
    k_rho = np.sqrt(np.where(evanescent, 0.0, rad))
    k0 = k.min()
    k_rho0 = np.sqrt(np.maximum(radicand(modality, k0, kz), 0.0))
    k_rho_prime = np.where(evanescent, 0.0, k_rho - k_rho0[:, None])
    return DispersionGrid(modality, kz, k, k_rho, k_rho0, k_rho_prime, evanescent)
