"""One-dimensional nonuniform-to-uniform Fourier summation.

Both routes evaluate::

    q[i] = sum_n c[n] * exp(+1j * nodes[n] * (l0 + i * dl)),   i = 0 .. n_out - 1

``direct_nudft`` does the O(n_out * M) sum literally.  ``plan``/``execute``
spread the coefficients onto an oversampled grid with an
exponential-of-semicircle kernel, take one inverse FFT and divide out the
kernel's Fourier transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft
import scipy.sparse

from .errors import ConfigError, DimensionError


def es_kernel(z: np.ndarray, beta: float) -> np.ndarray:
    """``exp(beta * (sqrt(1 - z^2) - 1))`` on ``|z| <= 1``, zero outside."""
    z = np.asarray(z, dtype=np.float64)
    inside = np.abs(z) <= 1.0
    out = np.zeros_like(z)
    out[inside] = np.exp(beta * (np.sqrt(1.0 - z[inside] ** 2) - 1.0))
    return out


def default_beta(width: int, sigma: float) -> float:
    # 2.3 * w at sigma = 2, scaled like (1 - 1/(2 sigma)) for other ratios
    return 2.3 * width * (1.0 - 1.0 / (2.0 * sigma)) / 0.75


def _kernel_ft(freqs: np.ndarray, width: int, beta: float) -> np.ndarray:
    # phi_hat(m) = int phi(u) cos(2 pi u m / n_f) du, u in grid cells; freqs = m / n_f
    x, w = np.polynomial.legendre.leggauss(4 * width + 40)
    u = 0.5 * width * x
    vals = es_kernel(2.0 * u / width, beta) * (0.5 * width * w)
    return np.cos(2.0 * np.pi * np.outer(freqs, u)) @ vals


@lru_cache(maxsize=64)
def _correction(n_out: int, n_fine: int, width: int, beta: float):
    out_m = np.arange(n_out) - n_out // 2
    phi_hat = _kernel_ft(out_m / n_fine, width, beta)
    if np.any(phi_hat <= 0):
        raise ConfigError("kernel correction vanishes on the output grid; raise sigma")
    corr = n_fine / phi_hat
    idx = np.mod(out_m, n_fine)
    corr.flags.writeable = False
    idx.flags.writeable = False
    return idx, corr


@dataclass(frozen=True, eq=False)
class NufftPlan:
    nodes: np.ndarray
    n_out: int
    delta_l: float
    l0: float
    sigma: float
    width: int
    beta: float
    n_fine: int
    spread: scipy.sparse.csr_matrix
    pre_phase: np.ndarray
    out_index: np.ndarray
    correction: np.ndarray
    error_estimate: float

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)


def plan(nodes, n_out: int, delta_l: float, l0: float = 0.0,
         sigma: float = 2.0, width: int = 12, beta: float | None = None) -> NufftPlan:
    """Precompute spreading tables for a fixed node set and output grid.

    Every node must lie in the band ``[-pi/delta_l, pi/delta_l)`` that the
    output grid can represent.
    """
    nodes = np.asarray(nodes, dtype=np.float64).ravel()
    if nodes.size == 0:
        raise ConfigError("NUFFT plan needs at least one node")
    if not np.all(np.isfinite(nodes)):
        raise ConfigError("NUFFT nodes must be finite")
    if int(n_out) != n_out or n_out < 2:
        raise ConfigError("n_out must be an integer >= 2")
    if not delta_l > 0:
        raise ConfigError("delta_l must be positive")
    if sigma < 1.25:
        raise ConfigError("oversampling ratio sigma must be >= 1.25")
    if int(width) != width or width < 2:
        raise ConfigError("kernel width must be an integer >= 2")
    n_out, width = int(n_out), int(width)
    band = math.pi / delta_l
    bad = np.flatnonzero((nodes < -band) | (nodes >= band))
    if bad.size:
        i = int(bad[0])
        raise ConfigError(
            f"node {i} = {nodes[i]:.6g} rad/m lies outside the representable band "
            f"[{-band:.6g}, {band:.6g})")
    if beta is None:
        beta = default_beta(width, sigma)

    n_fine = max(scipy.fft.next_fast_len(int(math.ceil(sigma * n_out))), 2 * width)
    half = n_out // 2
    x = nodes * delta_l
    t = x * n_fine / (2.0 * math.pi)
    start = np.ceil(t - width / 2.0).astype(np.int64)
    cols = start[:, None] + np.arange(width)[None, :]
    weights = es_kernel((cols - t[:, None]) * (2.0 / width), beta)
    rows = np.mod(cols, n_fine)
    m = len(nodes)
    spread = scipy.sparse.csr_matrix(
        (weights.ravel(), (rows.ravel(), np.repeat(np.arange(m), width))), shape=(n_fine, m))

    out_index, correction = _correction(n_out, n_fine, width, float(beta))
    # empirical max-abs error per unit-norm input, conservative by ~2x
    error_estimate = 80.0 * math.exp(-math.pi * width * math.sqrt(1.0 - 1.0 / sigma))
    return NufftPlan(
        nodes=nodes, n_out=n_out, delta_l=float(delta_l), l0=float(l0), sigma=float(sigma),
        width=width, beta=float(beta), n_fine=n_fine, spread=spread,
        pre_phase=np.exp(1j * nodes * l0) * np.exp(1j * x * half),
        out_index=out_index, correction=correction,
        error_estimate=error_estimate,
    )


def execute(p: NufftPlan, coefficients) -> np.ndarray:
    """Apply a plan to coefficients of shape ``(M,)`` or ``(batch, M)``."""
    c = np.asarray(coefficients)
    if c.shape[-1] != p.num_nodes:
        raise DimensionError(f"expected {p.num_nodes} coefficients, got {c.shape[-1]}")
    lead = c.shape[:-1]
    c2 = c.reshape(-1, p.num_nodes) * p.pre_phase
    fine = (p.spread @ c2.T).T
    out = scipy.fft.ifft(fine, axis=-1)[:, p.out_index] * p.correction
    return out.reshape(lead + (p.n_out,))


def direct_nudft(nodes, coefficients, n_out: int, delta_l: float, l0: float = 0.0) -> np.ndarray:
    """Literal summation; coefficients may carry leading batch axes."""
    nodes = np.asarray(nodes, dtype=np.float64).ravel()
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.shape[-1] != nodes.size:
        raise DimensionError(f"expected {nodes.size} coefficients, got {c.shape[-1]}")
    if nodes.size == 0:
        return np.zeros(c.shape[:-1] + (n_out,), dtype=np.complex128)
    l = l0 + np.arange(n_out) * delta_l
    return c @ np.exp(1j * np.outer(nodes, l))
