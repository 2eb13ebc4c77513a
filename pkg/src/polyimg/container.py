"""PLSC binary container: magic, version, JSON header, little-endian payload.

Layout::

    b"PLSC" | u8 version (=1) | u32le header_length | header (UTF-8 JSON) | payload

The payload is row-major in the order of ``header["axes"]``.  ``dtype`` is
``"c32x2"`` (interleaved real/imag float32) or ``"f32"``.  Complex data held
in double precision is rounded to single precision on write.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError
from .forward import DataCube
from .geometry import AcquisitionSpec, ArrayGeometry
from .recon import Axis, ImageGrid, ImageVolume
from .spectral import FORWARD_SCALE, INVERSE_SCALE, SpectralCube

MAGIC = b"PLSC"
VERSION = 1
KINDS = ("datacube", "spectral", "image")
DTYPES = {"c32x2": np.dtype("<c8"), "f32": np.dtype("<f4")}


def _dumps(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode(kind: str, modality: str, axes: list, data: np.ndarray, provenance: dict,
           dtype: str | None = None, extra: dict | None = None) -> bytes:
    if kind not in KINDS:
        raise ConfigError(f"unknown container kind {kind!r}")
    if dtype is None:
        dtype = "c32x2" if np.iscomplexobj(data) else "f32"
    if dtype not in DTYPES:
        raise ConfigError(f"unknown dtype {dtype!r}")
    counts = tuple(int(a["count"]) for a in axes)
    if tuple(data.shape) != counts:
        raise DimensionError(f"data shape {data.shape} != axes {counts}")
    header = {"kind": kind, "modality": modality, "axes": axes, "dtype": dtype,
              "provenance": provenance}
    if extra:
        header.update(extra)
    hb = _dumps(header)
    payload = np.ascontiguousarray(data, dtype=DTYPES[dtype]).tobytes()
    return MAGIC + struct.pack("<BI", VERSION, len(hb)) + hb + payload


def decode(blob: bytes):
    """Return ``(header, array)``."""
    if blob[:4] != MAGIC:
        raise ConfigError("not a PLSC container (bad magic)")
    if len(blob) < 9:
        raise DimensionError("truncated PLSC preamble")
    version, hlen = struct.unpack("<BI", blob[4:9])
    if version != VERSION:
        raise ConfigError(f"unsupported PLSC version {version}")
    try:
        header = json.loads(blob[9:9 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"corrupt PLSC header: {exc}") from exc
    dt = DTYPES.get(header.get("dtype"))
    if dt is None:
        raise ConfigError(f"unknown dtype {header.get('dtype')!r}")
    counts = tuple(int(a["count"]) for a in header["axes"])
    payload = blob[9 + hlen:]
    expect = int(np.prod(counts)) * dt.itemsize
    if len(payload) != expect:
        raise DimensionError(f"payload has {len(payload)} bytes, header implies {expect}")
    return header, np.frombuffer(payload, dtype=dt).reshape(counts).copy()


def write_plsc(path, kind, modality, axes, data, provenance, dtype=None, extra=None) -> None:
    atomic_write(path, encode(kind, modality, axes, data, provenance, dtype, extra))


def read_plsc(path):
    with open(path, "rb") as f:
        return decode(f.read())


def _axis(name, count, start, step, unit) -> dict:
    return {"name": name, "count": int(count), "start": float(start), "step": float(step), "unit": unit}


def save_datacube(path, cube: DataCube, geom: ArrayGeometry, acq: AcquisitionSpec,
                  provenance: dict | None = None) -> None:
    axes = [
        _axis("channel", len(cube.channels), 0, 1, ""),
        _axis("scan_z", len(cube.scan_positions), cube.scan_positions[0],
              acq.scan_step, "m"),
        _axis("frequency", len(cube.freqs), cube.freqs[0],
              (acq.freq_stop - acq.freq_start) / (acq.num_freqs - 1), "Hz"),
    ]
    prov = {"geometry": geom.digest(), "acquisition": acq.digest()}
    prov.update(provenance or {})
    extra = {"geometry": geom.to_dict(), "acquisition": acq.to_dict()}
    write_plsc(path, "datacube", cube.modality, axes, cube.samples, prov, extra=extra)


def load_datacube(path):
    """Return ``(cube, geometry, acquisition)``; axis arrays are rebuilt from the stored specs."""
    header, data = read_plsc(path)
    if header["kind"] != "datacube":
        raise ConfigError(f"{path}: expected a datacube, found {header['kind']!r}")
    geom = ArrayGeometry.from_dict(header["geometry"])
    acq = AcquisitionSpec.from_dict(header["acquisition"])
    cube = DataCube(data.astype(np.complex128), header["modality"], geom.channels,
                    acq.scan_positions, acq.freqs)
    return cube, geom, acq


def save_spectral(path, spec: SpectralCube, provenance: dict | None = None) -> None:
    axes = [
        _axis("channel", spec.samples.shape[0], 0, 1, ""),
        _axis("kz", spec.n_pad, spec.kz[0], spec.dkz, "rad/m"),
        _axis("frequency", len(spec.freqs), spec.freqs[0],
              spec.freqs[1] - spec.freqs[0] if len(spec.freqs) > 1 else 0.0, "Hz"),
    ]
    extra = {"normalization": {"forward_scale": FORWARD_SCALE, "inverse_scale": INVERSE_SCALE},
             "scan_step": spec.scan_step, "scan_origin": spec.scan_origin,
             "num_scan_positions": spec.num_scan_positions, "pad_factor": spec.pad_factor,
             "window": spec.window, "channels": np.asarray(spec.channels).tolist(),
             "freqs": np.asarray(spec.freqs).tolist(), "kz": np.asarray(spec.kz).tolist()}
    write_plsc(path, "spectral", spec.modality, axes, spec.samples, provenance or {}, extra=extra)


def load_spectral(path) -> SpectralCube:
    header, data = read_plsc(path)
    if header["kind"] != "spectral":
        raise ConfigError(f"{path}: expected a spectral cube, found {header['kind']!r}")
    return SpectralCube(data.astype(np.complex128), np.array(header["kz"]), header["modality"],
                        np.array(header["channels"]), np.array(header["freqs"]),
                        header["scan_step"], header["scan_origin"], header["num_scan_positions"],
                        header["pad_factor"], header["window"])


def save_image(path, image: ImageVolume, dtype: str = "c32x2") -> None:
    g = image.grid
    axes = [_axis(n, a.count, a.start, a.step, "m") for n, a in zip("xyz", (g.x, g.y, g.z))]
    data = image.values if dtype == "c32x2" else np.abs(image.values)
    modality = image.provenance.get("modality", "")
    write_plsc(path, "image", modality, axes, data, image.provenance, dtype=dtype)


def load_image(path) -> ImageVolume:
    header, data = read_plsc(path)
    if header["kind"] != "image":
        raise ConfigError(f"{path}: expected an image, found {header['kind']!r}")
    ax = {a["name"]: a for a in header["axes"]}
    try:
        grid = ImageGrid(*(Axis(ax[n]["start"], ax[n]["step"], ax[n]["count"]) for n in "xyz"))
    except KeyError as exc:
        raise DimensionError(f"image container lacks axis {exc}") from exc
    return ImageVolume(data, grid, header.get("provenance", {}))
