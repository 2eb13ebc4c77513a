"""Point-spread-function measurements and image comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, NumericError
from .recon import ImageVolume

AXES = "xyz"


def _magnitude(image) -> np.ndarray:
    values = image.values if isinstance(image, ImageVolume) else np.asarray(image)
    return np.abs(values)


def to_db_normalized(image, floor_db: float = -20.0) -> np.ndarray:
    """``20 log10(|v| / max|v|)`` clipped below at ``floor_db``."""
    a = _magnitude(image)
    peak = a.max() if a.size else 0.0
    if not peak > 0:
        raise NumericError("image is all zero; cannot normalise")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(a / peak)
    return np.maximum(db, floor_db)


def parabolic_offset(ym: float, y0: float, yp: float) -> float:
    """Sub-sample vertex offset of the parabola through three equally spaced samples."""
    den = ym - 2.0 * y0 + yp
    if den == 0:
        return 0.0
    return float(np.clip(0.5 * (ym - yp) / den, -0.5, 0.5))


def half_power_width(cut: np.ndarray, i: int, step: float) -> float:
    """Full width at ``1/sqrt(2)`` of ``cut[i]`` with linear interpolation; NaN if it runs off the cut."""
    level = cut[i] / math.sqrt(2.0)
    j = i
    while j > 0 and cut[j - 1] >= level:
        j -= 1
    if j == 0:
        return math.nan
    left = (j - 1) + (level - cut[j - 1]) / (cut[j] - cut[j - 1])
    j = i
    n = len(cut)
    while j < n - 1 and cut[j + 1] >= level:
        j += 1
    if j == n - 1:
        return math.nan
    right = j + (cut[j] - level) / (cut[j] - cut[j + 1])
    return (right - left) * step


@dataclass
class PsfReport:
    peak_index: tuple
    peak_position: tuple
    peak_value: float
    widths: tuple
    pslr_db: tuple
    mean_sidelobe_db: tuple
    floor_db: float
    exclusion_widths: float
    peak_offset: Optional[tuple] = None
    warnings: list = field(default_factory=list)

    def width(self, axis: str) -> float:
        return self.widths[AXES.index(axis)]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["peak_index"] = [int(i) for i in self.peak_index]
        return d


def psf_analyze(image: ImageVolume, expected_peak=None, floor_db: float = -40.0,
                exclusion_widths: float = 2.0, exclusion=None) -> PsfReport:
    """Locate the global peak and measure half-power widths and sidelobes on axis cuts.

    Sidelobe statistics use the through-peak cut outside ``exclusion_widths``
    measured widths of the peak, in dB relative to the peak and clipped at
    ``floor_db``.  ``exclusion`` gives fixed per-axis half-widths in metres
    instead, e.g. twice the predicted resolutions.
    """
    a = _magnitude(image)
    peak = float(a.max())
    if not peak > 0:
        raise NumericError("image is all zero")
    idx = np.unravel_index(int(np.argmax(a)), a.shape)
    axes = (image.grid.x, image.grid.y, image.grid.z)
    notes = []
    if any(n > 1 and i in (0, n - 1) for i, n in zip(idx, a.shape)):
        notes.append("peak lies on the grid boundary; widths are unreliable")

    pos, widths, pslr, mean_sl = [], [], [], []
    for ax, axis in enumerate(axes):
        sl = list(idx)
        sl[ax] = slice(None)
        cut = a[tuple(sl)]
        i = idx[ax]
        off = parabolic_offset(cut[i - 1], cut[i], cut[i + 1]) if 0 < i < len(cut) - 1 else 0.0
        centre = axis.start + (i + off) * axis.step
        pos.append(float(centre))
        w = half_power_width(cut, i, axis.step) if len(cut) >= 3 else math.nan
        widths.append(float(w))
        if math.isnan(w):
            if len(cut) >= 3:
                notes.append(f"half-power width along {AXES[ax]} not bracketed by the grid")
            pslr.append(math.nan)
            mean_sl.append(math.nan)
            continue
        coords = axis.values
        half = exclusion[ax] if exclusion is not None else exclusion_widths * w
        side = np.abs(coords - centre) > half
        if not side.any():
            pslr.append(math.nan)
            mean_sl.append(math.nan)
            continue
        with np.errstate(divide="ignore"):
            db = np.maximum(20.0 * np.log10(cut[side] / peak), floor_db)
        pslr.append(float(db.max()))
        mean_sl.append(float(db.mean()))

    for n in notes:
        warnings.warn(n, stacklevel=2)
    offset = None
    if expected_peak is not None:
        offset = tuple(float(p - e) for p, e in zip(pos, expected_peak))
    return PsfReport(
        peak_index=tuple(int(i) for i in idx), peak_position=tuple(pos), peak_value=peak,
        widths=tuple(widths), pslr_db=tuple(pslr), mean_sidelobe_db=tuple(mean_sl),
        floor_db=floor_db, exclusion_widths=exclusion_widths, peak_offset=offset, warnings=notes)


def image_similarity(a: ImageVolume, b: ImageVolume, db_floor: float = -20.0) -> dict:
    """Peak-normalised magnitude comparison on the union of both images' ``db_floor`` masks.

    ``ncc`` is the Pearson correlation of the normalised magnitudes on the
    mask; ``max_abs_diff_db`` is the largest dB discrepancy there, with both
    images clipped at ``db_floor``.
    """
    if a.grid != b.grid:
        raise DimensionError("images are on different grids")
    ma = _magnitude(a)
    mb = _magnitude(b)
    if not (ma.max() > 0 and mb.max() > 0):
        raise NumericError("cannot compare an all-zero image")
    na = ma / ma.max()
    nb = mb / mb.max()
    thr = 10.0 ** (db_floor / 20.0)
    mask = (na >= thr) | (nb >= thr)
    x = na[mask] - na[mask].mean()
    y = nb[mask] - nb[mask].mean()
    den = math.sqrt(float((x * x).sum()) * float((y * y).sum()))
    ncc = float((x * y).sum()) / den if den > 0 else 1.0
    da = to_db_normalized(a, db_floor)[mask]
    db = to_db_normalized(b, db_floor)[mask]
    return {"ncc": ncc, "max_abs_diff_db": float(np.abs(da - db).max()),
            "mask_voxels": int(mask.sum()), "db_floor": db_floor}


def axis_cuts(image: ImageVolume, index=None) -> dict:
    """Through-``index`` (default: peak) magnitude cuts along x, y and z."""
    a = _magnitude(image)
    if index is None:
        index = np.unravel_index(int(np.argmax(a)), a.shape)
    out = {}
    for ax, axis in enumerate((image.grid.x, image.grid.y, image.grid.z)):
        sl = list(index)
        sl[ax] = slice(None)
        out[AXES[ax]] = (axis.values, a[tuple(sl)])
    return out
