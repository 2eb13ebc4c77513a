"""Polyline array geometry, acquisition grids, sampling rules and resolution estimates.

Coordinate convention: the circumscribing circle of radius ``R0`` is centred
at the origin, the polyline lies in the ``z = 0`` plane on the ``y < 0`` side
and is concave towards the scene, which surrounds the origin.  The array is
symmetric about the y-axis and is scanned mechanically along ``z``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, GeometryError, NumericError

C0 = 299792458.0

MODALITIES = ("monostatic", "multistatic")
PAIRINGS = ("all_pairs", "within_section")


@dataclass(frozen=True)
class PolylineSpec:
    """Design parameters of one horizontal polyline array.

    ``elements_per_section`` counts transceivers (monostatic) or receivers
    (multistatic).  Elements span each chord end to end, so the chord length
    is ``(elements_per_section - 1) * element_spacing``.  Transmitters of a
    multistatic array always sit at the section joints and the two ends.
    """

    circumradius: float
    num_sections: int
    modality: str
    elements_per_section: int
    element_spacing: float
    pairing: str = "all_pairs"
    tx_placement: str = "section_joints_and_ends"

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ConfigError(f"unknown modality {self.modality!r}")
        if self.pairing not in PAIRINGS:
            raise ConfigError(f"unknown pairing policy {self.pairing!r}")
        if self.tx_placement != "section_joints_and_ends":
            raise ConfigError(f"unsupported tx placement {self.tx_placement!r}")
        if int(self.num_sections) != self.num_sections or self.num_sections < 1:
            raise ConfigError("num_sections must be a positive integer")
        if int(self.elements_per_section) != self.elements_per_section or self.elements_per_section < 1:
            raise ConfigError("elements_per_section must be a positive integer")
        if not (self.circumradius > 0 and math.isfinite(self.circumradius)):
            raise ConfigError("circumradius must be positive and finite")
        if not (self.element_spacing > 0 and math.isfinite(self.element_spacing)):
            raise ConfigError("element_spacing must be positive and finite")
        if self.chord_length > 2.0 * self.circumradius:
            raise GeometryError(
                f"chord length {self.chord_length:.6g} m exceeds the circle diameter "
                f"{2.0 * self.circumradius:.6g} m"
            )

    @property
    def chord_length(self) -> float:
        return (self.elements_per_section - 1) * self.element_spacing

    @property
    def section_angle(self) -> float:
        """Central angle subtended by one chord (rad)."""
        return 2.0 * math.asin(self.chord_length / (2.0 * self.circumradius))

    @classmethod
    def from_dict(cls, d: dict) -> "PolylineSpec":
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad polyline spec: {exc}") from exc


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Element positions and channel list of a built polyline array.

    ``positions`` has shape ``(E, 2)`` holding ``(x', y')``.  ``channels`` is
    ``(C,)`` element indices for a monostatic array and ``(C, 2)`` rows of
    ``(tx_index, rx_index)`` for a multistatic one.
    """

    spec: PolylineSpec
    positions: np.ndarray
    roles: tuple
    sections: np.ndarray
    channels: np.ndarray
    pairing_policy: str
    subtended_angle: float

    @property
    def modality(self) -> str:
        return self.spec.modality

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    def indices(self, role: str) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.roles) if r == role], dtype=np.int64)

    def channel_positions(self):
        """Per-channel element positions.

        Returns one ``(C, 2)`` array for monostatic geometries and a
        ``(tx, rx)`` pair of ``(C, 2)`` arrays for multistatic ones.
        """
        if self.modality == "monostatic":
            return self.positions[self.channels]
        return self.positions[self.channels[:, 0]], self.positions[self.channels[:, 1]]

    def to_dict(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "element_positions": [
                {"x": float(p[0]), "y": float(p[1]), "role": r, "section": int(s)}
                for p, r, s in zip(self.positions, self.roles, self.sections)
            ],
            "channels": self.channels.tolist(),
            "pairing_policy": self.pairing_policy,
            "subtended_angle": self.subtended_angle,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArrayGeometry":
        try:
            spec = PolylineSpec.from_dict(d["spec"])
            elems = d["element_positions"]
            positions = np.array([[e["x"], e["y"]] for e in elems], dtype=np.float64)
            roles = tuple(e["role"] for e in elems)
            sections = np.array([e["section"] for e in elems], dtype=np.int64)
            channels = np.asarray(d["channels"], dtype=np.int64)
            return cls(spec, positions, roles, sections, channels,
                       d["pairing_policy"], float(d["subtended_angle"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed geometry document: {exc}") from exc

    def digest(self) -> str:
        return _digest(self.to_dict())


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def vertex_angles(spec: PolylineSpec) -> np.ndarray:
    """Angles of the ``num_sections + 1`` polyline vertices, measured from -y."""
    n = spec.num_sections
    return (np.arange(n + 1) - n / 2.0) * spec.section_angle


def build_polyline(spec: PolylineSpec) -> ArrayGeometry:
    """Place elements along equal chords of the circumscribing circle and enumerate channels."""
    R0 = spec.circumradius
    phi = vertex_angles(spec)
    vertices = np.column_stack([R0 * np.sin(phi), -R0 * np.cos(phi)])

    # Elements are laid out symmetrically about each chord midpoint so that
    # the x -> -x mirror image of the array is exact in floating point.
    n = spec.elements_per_section
    offsets = (np.arange(n) - (n - 1) / 2.0) * spec.element_spacing
    chord_pts, chord_sec = [], []
    for s in range(spec.num_sections):
        phi_mid = 0.5 * (phi[s] + phi[s + 1])
        half = spec.section_angle / 2.0
        mid = R0 * math.cos(half) * np.array([math.sin(phi_mid), -math.cos(phi_mid)])
        direction = np.array([math.cos(phi_mid), math.sin(phi_mid)])
        chord_pts.append(mid + offsets[:, None] * direction)
        chord_sec.append(np.full(n, s))
    chord_pts = np.concatenate(chord_pts)
    chord_sec = np.concatenate(chord_sec)

    if spec.modality == "monostatic":
        positions = chord_pts
        roles = ("transceiver",) * len(positions)
        sections = chord_sec
        channels = np.arange(len(positions), dtype=np.int64)
    else:
        n_tx = spec.num_sections + 1
        positions = np.concatenate([vertices, chord_pts])
        roles = ("transmit",) * n_tx + ("receive",) * len(chord_pts)
        # a joint transmitter is tagged with the section that starts there
        sections = np.concatenate([np.minimum(np.arange(n_tx), spec.num_sections - 1), chord_sec])
        rx = np.arange(n_tx, len(positions))
        if spec.pairing == "all_pairs":
            channels = np.array([(t, r) for t in range(n_tx) for r in rx], dtype=np.int64)
        else:
            channels = np.array(
                [(t, r) for s in range(spec.num_sections) for t in (s, s + 1)
                 for r in rx[chord_sec == s]],
                dtype=np.int64,
            )
    return ArrayGeometry(
        spec=spec,
        positions=positions,
        roles=roles,
        sections=sections.astype(np.int64),
        channels=channels,
        pairing_policy=spec.pairing,
        subtended_angle=spec.num_sections * spec.section_angle,
    )


@dataclass(frozen=True)
class AcquisitionSpec:
    """Stepped-frequency sweep and vertical mechanical scan, centred on z = 0."""

    freq_start: float
    freq_stop: float
    num_freqs: int
    scan_step: float
    num_scan_positions: int

    def __post_init__(self):
        if not self.freq_stop > self.freq_start > 0:
            raise ConfigError("require 0 < freq_start < freq_stop")
        if int(self.num_freqs) != self.num_freqs or self.num_freqs < 2:
            raise ConfigError("num_freqs must be an integer >= 2")
        if not self.scan_step > 0:
            raise ConfigError("scan_step must be positive")
        if int(self.num_scan_positions) != self.num_scan_positions or self.num_scan_positions < 1:
            raise ConfigError("num_scan_positions must be a positive integer")

    @property
    def freqs(self) -> np.ndarray:
        return np.linspace(self.freq_start, self.freq_stop, self.num_freqs)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * self.freqs / C0

    @property
    def dk(self) -> float:
        return 2.0 * np.pi * (self.freq_stop - self.freq_start) / (self.num_freqs - 1) / C0

    @property
    def bandwidth(self) -> float:
        return self.freq_stop - self.freq_start

    @property
    def lambda_min(self) -> float:
        return C0 / self.freq_stop

    @property
    def center_frequency(self) -> float:
        return 0.5 * (self.freq_start + self.freq_stop)

    @property
    def lambda_c(self) -> float:
        return C0 / self.center_frequency

    @property
    def k_c(self) -> float:
        return 2.0 * np.pi / self.lambda_c

    @property
    def scan_positions(self) -> np.ndarray:
        m = self.num_scan_positions
        return (np.arange(m) - (m - 1) / 2.0) * self.scan_step

    @property
    def scan_length(self) -> float:
        return (self.num_scan_positions - 1) * self.scan_step

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AcquisitionSpec":
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad acquisition spec: {exc}") from exc

    def digest(self) -> str:
        return _digest(self.to_dict())


def default_theta_z(acq: AcquisitionSpec, R0: float) -> float:
    """Angle subtended at the scene centre by the vertical scan."""
    return 2.0 * math.atan(acq.scan_length / (2.0 * R0))


def rx_spacing_bound(L_R: float, D: float, R0: float, lambda_min: float) -> float:
    """Largest receive spacing free of aliasing for a multistatic polyline section."""
    span = L_R + D
    if span == 0:
        return math.inf
    return lambda_min * math.sqrt(span ** 2 / 4.0 + R0 ** 2) / span


def vertical_step_bound(lambda_min: float, theta_z: float) -> float:
    return lambda_min / (4.0 * math.sin(theta_z / 2.0))


@dataclass(frozen=True)
class SamplingReport:
    rx_spacing_bound: float
    mono_spacing_bound: float
    vertical_step_bound: float
    element_spacing: float
    scan_step: float
    horizontal_ok: bool
    vertical_ok: bool
    target_dimension: float
    standoff: float
    theta_z: float

    @property
    def ok(self) -> bool:
        return self.horizontal_ok and self.vertical_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def check_sampling(geom: ArrayGeometry, acq: AcquisitionSpec,
                   target_dimension: float = 0.5,
                   theta_z: Optional[float] = None) -> SamplingReport:
    """Compare the array and scan step against the anti-aliasing spacing bounds.

    The receive bound applies to multistatic arrays; a monostatic array must
    satisfy half of it because of the two-way path.
    """
    spec = geom.spec
    if theta_z is None:
        theta_z = default_theta_z(acq, spec.circumradius)
    if target_dimension < 0:
        raise ConfigError("target dimension must be non-negative")
    if not 0 < theta_z < math.pi:
        raise ConfigError("theta_z must lie in (0, pi)")
    rx_bound = rx_spacing_bound(spec.chord_length, target_dimension, spec.circumradius, acq.lambda_min)
    mono_bound = rx_bound / 2.0
    v_bound = vertical_step_bound(acq.lambda_min, theta_z)
    h_bound = mono_bound if spec.modality == "monostatic" else rx_bound
    return SamplingReport(
        rx_spacing_bound=rx_bound,
        mono_spacing_bound=mono_bound,
        vertical_step_bound=v_bound,
        element_spacing=spec.element_spacing,
        scan_step=acq.scan_step,
        horizontal_ok=bool(spec.element_spacing <= h_bound),
        vertical_ok=bool(acq.scan_step <= v_bound),
        target_dimension=target_dimension,
        standoff=spec.circumradius,
        theta_z=theta_z,
    )


@dataclass(frozen=True)
class ResolutionReport:
    delta_x: float
    delta_y: float
    delta_z: float
    theta_h: float
    theta_z: float
    lambda_c: float
    kx_max: float

    def to_dict(self) -> dict:
        return asdict(self)


def predict_resolutions(geom: ArrayGeometry, acq: AcquisitionSpec,
                        theta_z: Optional[float] = None) -> ResolutionReport:
    """Cross-range, height and down-range resolution predictions.

    The same formulas hold for monostatic and multistatic arrays.
    """
    theta_h = geom.subtended_angle
    if theta_z is None:
        theta_z = default_theta_z(acq, geom.spec.circumradius)
    if not 0 < theta_h < math.pi or not 0 < theta_z < math.pi:
        raise ConfigError("theta_h and theta_z must lie in (0, pi)")
    if acq.bandwidth <= 0:
        raise NumericError("zero bandwidth: down-range resolution undefined")
    lam = acq.lambda_c
    kx_max = 2.0 * acq.k_c * math.sin(theta_h / 2.0)
    return ResolutionReport(
        delta_x=lam / (4.0 * math.sin(theta_h / 2.0)),
        delta_y=C0 / (2.0 * acq.bandwidth),
        delta_z=lam / (4.0 * math.sin(theta_z / 2.0)),
        theta_h=theta_h,
        theta_z=theta_z,
        lambda_c=lam,
        kx_max=kx_max,
    )
