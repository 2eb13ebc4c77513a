"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class PolyimgError(Exception):
    exit_code = 1


class ConfigError(PolyimgError, ValueError):
    """Malformed or inconsistent configuration / input values."""

    exit_code = 2


class GeometryError(ConfigError):
    """Requested array geometry cannot exist (e.g. chord longer than the diameter)."""


class DimensionError(PolyimgError, ValueError):
    """Array shapes or axes that do not agree with each other."""

    exit_code = 4


class CoverageError(DimensionError):
    """Range-profile grid does not cover the distances needed by the image grid."""


class NumericError(PolyimgError, ArithmeticError):
    """Degenerate numerical input such as an all-zero image or zero bandwidth."""

    exit_code = 5
