"""Reference configurations shared by the CLI defaults, benchmark and tests.

A 30-35 GHz sweep in 51 steps, a 0.5 m vertical scan, and three-section
arrays on a 1 m circle.  Point layouts and image grids are chosen to cover
the scene centre at better than half the predicted resolution.
"""

from .forward import Scatterer, Scene
from .geometry import AcquisitionSpec, PolylineSpec
from .recon import Axis, ImageGrid

REFERENCE_ACQUISITION = AcquisitionSpec(
    freq_start=30e9, freq_stop=35e9, num_freqs=51, scan_step=0.005, num_scan_positions=101)

REFERENCE_MONOSTATIC = PolylineSpec(
    circumradius=1.0, num_sections=3, modality="monostatic",
    elements_per_section=40, element_spacing=0.0048)

REFERENCE_MULTISTATIC = PolylineSpec(
    circumradius=1.0, num_sections=3, modality="multistatic",
    elements_per_section=20, element_spacing=0.0102, pairing="all_pairs")

TARGET_DIMENSION = 0.5


def polyline_preset(modality: str) -> PolylineSpec:
    return REFERENCE_MONOSTATIC if modality == "monostatic" else REFERENCE_MULTISTATIC


def point_scene(x=0.0, y=0.0, z=0.0, amplitude=1.0 + 0j) -> Scene:
    return Scene([Scatterer(x, y, z, amplitude)])


def five_point_scene() -> Scene:
    """Centre point plus +-10 cm offsets along x and z, all at y = 0."""
    pts = [(0.0, 0.0), (-0.1, 0.0), (0.1, 0.0), (0.0, -0.1), (0.0, 0.1)]
    return Scene([Scatterer(x, 0.0, z, 1.0 + 0j) for x, z in pts])


def psf_grid(n: int = 64) -> ImageGrid:
    """Fine grid around the scene centre for resolution measurements."""
    # start at -(n // 2) steps so the origin is a grid sample on every axis
    return ImageGrid(*(Axis(-(n // 2) * d, d, n) for d in (0.001, 0.002, 0.00125)))


def scene_grid() -> ImageGrid:
    """Coarse grid covering the five-point scene."""
    return ImageGrid(Axis.centered(0.0, 0.004, 65), Axis.centered(0.0, 0.01, 9),
                     Axis.centered(0.0, 0.0025, 101))
