import numpy as np
import pytest

from polyimg.geometry import AcquisitionSpec, PolylineSpec, build_polyline
from polyimg.presets import REFERENCE_ACQUISITION, REFERENCE_MONOSTATIC, REFERENCE_MULTISTATIC


@pytest.fixture(scope="session")
def mono_geom():
    return build_polyline(REFERENCE_MONOSTATIC)


@pytest.fixture(scope="session")
def multi_geom():
    return build_polyline(REFERENCE_MULTISTATIC)


@pytest.fixture(scope="session")
def ref_acq():
    return REFERENCE_ACQUISITION


@pytest.fixture(scope="session")
def small_acq():
    """Reduced sweep and scan for quick end-to-end checks."""
    return AcquisitionSpec(30e9, 35e9, 21, 0.005, 41)


@pytest.fixture(scope="session")
def small_geoms():
    mono = build_polyline(PolylineSpec(1.0, 3, "monostatic", 16, 0.0048))
    multi = build_polyline(PolylineSpec(1.0, 3, "multistatic", 8, 0.0102))
    return {"monostatic": mono, "multistatic": multi}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
