"""Near-field millimetre-wave imaging with polyline arrays.

Simulation, wavenumber-domain and back-projection reconstruction, sampling
and resolution design rules, PSF metrics and a small CLI.
"""

from .errors import (ConfigError, CoverageError, DimensionError, GeometryError, NumericError,
                     PolyimgError)
from .forward import DataCube, Scatterer, Scene, add_noise, simulate
from .geometry import (AcquisitionSpec, ArrayGeometry, PolylineSpec, build_polyline,
                       check_sampling, predict_resolutions)
from .metrics import image_similarity, psf_analyze
from .recon import ALGORITHMS, Axis, ImageGrid, ImageVolume, reconstruct

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AcquisitionSpec", "ArrayGeometry", "Axis", "ConfigError", "CoverageError",
    "DataCube", "DimensionError", "GeometryError", "ImageGrid", "ImageVolume", "NumericError",
    "PolyimgError", "PolylineSpec", "Scatterer", "Scene", "add_noise", "build_polyline",
    "check_sampling", "image_similarity", "predict_resolutions", "psf_analyze", "reconstruct",
    "simulate",
]
