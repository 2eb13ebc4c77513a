import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from polyimg.errors import DimensionError, NumericError
from polyimg.metrics import (axis_cuts, half_power_width, image_similarity, parabolic_offset,
                             psf_analyze, to_db_normalized)
from polyimg.recon import Axis, ImageGrid, ImageVolume

SINC_HALF_POWER = 0.8858929413789047  # full -3 dB width of |sinc(x/a)| in units of a


def _sinc_image(a=(0.01, 0.03, 0.012), n=(81, 61, 71), step=(0.0005, 0.0015, 0.0006),
                centre=(0.0, 0.0, 0.0)):
    axes = [Axis(c - (m // 2) * d, d, m) for c, d, m in zip(centre, step, n)]
    grid = ImageGrid(*axes)
    x, y, z = (ax.values for ax in axes)
    v = (np.sinc((x - centre[0]) / a[0])[:, None, None] * np.sinc((y - centre[1]) / a[1])[None, :, None]
         * np.sinc((z - centre[2]) / a[2])[None, None, :])
    return ImageVolume(v.astype(complex), grid)


def test_sinc_width_oracle():
    a = (0.01, 0.03, 0.012)
    rep = psf_analyze(_sinc_image(a))
    for w, ai in zip(rep.widths, a):
        assert abs(w / (SINC_HALF_POWER * ai) - 1) < 0.02
    assert rep.peak_index == (40, 30, 35)
    assert rep.warnings == []


def test_sidelobes_of_sinc():
    rep = psf_analyze(_sinc_image(), exclusion_widths=1.0)
    # first sinc sidelobe sits at -13.26 dB
    assert_allclose(rep.pslr_db[0], -13.26, atol=0.1)
    assert rep.mean_sidelobe_db[0] < rep.pslr_db[0]
    # a fixed exclusion wider than the first sidelobe drops it from the statistics
    wide = psf_analyze(_sinc_image(), exclusion=(0.018, 0.054, 0.0216))
    assert wide.pslr_db[0] < -17.0


def test_peak_offset_subvoxel():
    centre = (0.0002, -0.0004, 0.0001)
    rep = psf_analyze(_sinc_image(centre=centre), expected_peak=centre)
    steps = (0.0005, 0.0015, 0.0006)
    for off, d in zip(rep.peak_offset, steps):
        assert abs(off) < 0.2 * d


def test_constant_image_warns():
    grid = ImageGrid(Axis(0, 1, 4), Axis(0, 1, 4), Axis(0, 1, 4))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        rep = psf_analyze(ImageVolume(np.ones((4, 4, 4), complex), grid))
    assert any("boundary" in str(w.message) for w in rec)
    assert any("boundary" in w for w in rep.warnings)
    assert all(math.isnan(w) for w in rep.widths)


def test_all_zero_image():
    grid = ImageGrid(Axis(0, 1, 3), Axis(0, 1, 3), Axis(0, 1, 3))
    img = ImageVolume(np.zeros((3, 3, 3), complex), grid)
    with pytest.raises(NumericError):
        psf_analyze(img)
    with pytest.raises(NumericError):
        to_db_normalized(img)


def test_db_normalisation():
    v = np.array([2.0, 0.2, 0.0, 1e-4])
    db = to_db_normalized(v)
    assert_allclose(db, [0.0, -20.0, -20.0, -20.0])
    assert to_db_normalized(v, -100)[3] == pytest.approx(20 * math.log10(0.5e-4))


def test_parabolic_offset():
    x = np.array([-1.0, 0.0, 1.0])
    y = 1 - (x - 0.3) ** 2
    assert_allclose(parabolic_offset(*y), 0.3)
    assert parabolic_offset(1.0, 1.0, 1.0) == 0.0


def test_half_power_width_unbracketed():
    assert math.isnan(half_power_width(np.array([1.0, 0.9, 0.8]), 0, 1.0))
    assert_allclose(half_power_width(np.array([0.0, 1.0, 0.0]), 1, 2.0), 2 * (1 - 1 / math.sqrt(2)) * 2)


def test_similarity_identity_and_scale():
    img = _sinc_image()
    s = image_similarity(img, img)
    assert s["ncc"] == pytest.approx(1.0) and s["max_abs_diff_db"] == 0.0
    doubled = ImageVolume(2 * img.values, img.grid)
    s = image_similarity(img, doubled)
    assert s["ncc"] == pytest.approx(1.0, abs=1e-12)
    assert s["max_abs_diff_db"] < 1e-9


def test_similarity_detects_difference():
    a = _sinc_image()
    b = ImageVolume(np.roll(a.values, 8, axis=0), a.grid)
    assert image_similarity(a, b)["ncc"] < 0.9
    other = ImageVolume(a.values, ImageGrid(Axis(-0.01, 0.0005, 81), a.grid.y, a.grid.z))
    with pytest.raises(DimensionError):
        image_similarity(a, other)


def test_axis_cuts_through_peak():
    img = _sinc_image()
    cuts = axis_cuts(img)
    assert set(cuts) == {"x", "y", "z"}
    coords, mag = cuts["y"]
    assert len(coords) == 61 and mag.max() == pytest.approx(1.0)


def test_report_serialises():
    import json
    rep = psf_analyze(_sinc_image(), expected_peak=(0, 0, 0))
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["peak_index"] == [40, 30, 35] and len(d["widths"]) == 3
