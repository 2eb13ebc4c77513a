"""Compiled inner loops for back-projection.

Channels are described by a transmit and a receive phase centre; the path
length to a pixel is ``scale * (|p - tx| + |p - rx|)`` so a monostatic
channel uses ``tx == rx`` and ``scale = 0.5`` to obtain ``rho``.
"""

import math

import numpy as np
from numba import config, njit, prange

# skip the TBB layer: older system TBB builds only produce a warning
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(parallel=True, cache=True, fastmath=False)
def backproject_kernel(q, tx, rx, scale, xs, ys, krho0, l0, dl, out):
    # q: (C, L, K) profiles, out: (nx, ny, K) accumulated in place
    n_ch, n_l, n_k = q.shape
    nx = xs.shape[0]
    ny = ys.shape[0]
    for ip in prange(nx * ny):
        ix = ip // ny
        iy = ip - ix * ny
        x = xs[ix]
        y = ys[iy]
        acc = out[ix, iy]
        for c in range(n_ch):
            dxt = x - tx[c, 0]
            dyt = y - tx[c, 1]
            dxr = x - rx[c, 0]
            dyr = y - rx[c, 1]
            rho = scale * (math.sqrt(dxt * dxt + dyt * dyt) + math.sqrt(dxr * dxr + dyr * dyr))
            u = (rho - l0) / dl
            i = int(math.floor(u))
            if i < 0 or i >= n_l - 1:
                continue
            f = u - i
            g = 1.0 - f
            for kk in range(n_k):
                v = q[c, i, kk] * g + q[c, i + 1, kk] * f
                ph = krho0[kk] * rho
                acc[kk] += v * complex(math.cos(ph), math.sin(ph))


@njit(parallel=True, cache=True, fastmath=False)
def direct_bp_kernel(s, tx, rx, zs, k0, dk, xs, ys, zv, out):
    # s: (C, M, N) weighted data; phase exp(+j k (|p - T| + |p - R|))
    n_ch, n_m, n_f = s.shape
    nx = xs.shape[0]
    ny = ys.shape[0]
    nz = zv.shape[0]
    for iv in prange(nx * ny * nz):
        ix = iv // (ny * nz)
        rem = iv - ix * ny * nz
        iy = rem // nz
        iz = rem - iy * nz
        x = xs[ix]
        y = ys[iy]
        z = zv[iz]
        acc = 0j
        for c in range(n_ch):
            dxt = x - tx[c, 0]
            dyt = y - tx[c, 1]
            dxr = x - rx[c, 0]
            dyr = y - rx[c, 1]
            ht = dxt * dxt + dyt * dyt
            hr = dxr * dxr + dyr * dyr
            for m in range(n_m):
                dzm = z - zs[m]
                dz2 = dzm * dzm
                path = math.sqrt(ht + dz2) + math.sqrt(hr + dz2)
                # four interleaved phase recursions keep the multiply chains short
                p0 = complex(math.cos(k0 * path), math.sin(k0 * path))
                st = complex(math.cos(dk * path), math.sin(dk * path))
                p1 = p0 * st
                p2 = p1 * st
                p3 = p2 * st
                st4 = (st * st) * (st * st)
                a0 = 0j
                a1 = 0j
                a2 = 0j
                a3 = 0j
                n = 0
                while n + 3 < n_f:
                    a0 += s[c, m, n] * p0
                    a1 += s[c, m, n + 1] * p1
                    a2 += s[c, m, n + 2] * p2
                    a3 += s[c, m, n + 3] * p3
                    p0 *= st4
                    p1 *= st4
                    p2 *= st4
                    p3 *= st4
                    n += 4
                while n < n_f:
                    a0 += s[c, m, n] * p0
                    p0 *= st
                    n += 1
                acc += (a0 + a1) + (a2 + a3)
        out[ix, iy, iz] = acc


def warmup():
    """Trigger compilation on tiny inputs."""
    q = np.zeros((1, 2, 1), np.complex128)
    p = np.zeros((1, 2))
    a = np.zeros(1)
    backproject_kernel(q, p, p, 0.5, a, a, a, 0.0, 1.0, np.zeros((1, 1, 1), np.complex128))
    direct_bp_kernel(np.zeros((1, 1, 1), np.complex128), p, p, a, 1.0, 1.0, a, a, a,
                     np.zeros((1, 1, 1), np.complex128))
