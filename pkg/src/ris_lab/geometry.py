"""Array geometry, angular grids and direction arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ArrayConfig:
    """Rectangular phase-only reflectarray.

    Element ``[x, y]`` sits at ``(x * pitch_m, y * pitch_m)``; element ``[0, 0]``
    is the edge (reference) element.
    """

    elements_x: int
    elements_y: int
    pitch_m: float
    frequency_hz: float
    phase_bits: int = 2

    def __post_init__(self):
        if self.elements_x < 1 or self.elements_y < 1:
            raise ValueError("array needs at least one element per axis")
        if not self.pitch_m > 0:
            raise ValueError("pitch_m must be positive")
        if not self.frequency_hz > 0:
            raise ValueError("frequency_hz must be positive")
        if not 1 <= self.phase_bits <= 8:
            raise ValueError("phase_bits must be in [1, 8]")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def shape(self) -> tuple[int, int]:
        return (self.elements_x, self.elements_y)

    @property
    def size(self) -> int:
        return self.elements_x * self.elements_y

    def with_bits(self, bits: int) -> ArrayConfig:
        return ArrayConfig(self.elements_x, self.elements_y, self.pitch_m, self.frequency_hz, bits)


@dataclass(frozen=True)
class Direction:
    """Elevation ``theta_deg`` from broadside and azimuth ``phi_deg``, in degrees."""

    theta_deg: float
    phi_deg: float

    def __post_init__(self):
        if not 0.0 <= self.theta_deg <= 90.0:
            raise ValueError(f"theta_deg={self.theta_deg} outside [0, 90]")
        object.__setattr__(self, "phi_deg", float(self.phi_deg) % 360.0)

    @property
    def theta_rad(self) -> float:
        return math.radians(self.theta_deg)

    @property
    def phi_rad(self) -> float:
        return math.radians(self.phi_deg)

    def direction_cosines(self) -> tuple[float, float]:
        """(u, v) = (sin θ cos φ, sin θ sin φ)."""
        s = math.sin(self.theta_rad)
        return s * math.cos(self.phi_rad), s * math.sin(self.phi_rad)


@dataclass(frozen=True)
class AngularGrid:
    """Regular (θ, φ) sampling of the upper hemisphere.

    θ runs 0..90 inclusive, φ runs 0..360-step. Arrays are indexed ``[theta, phi]``.
    """

    theta_step_deg: float = 1.0
    phi_step_deg: float = 1.0

    def __post_init__(self):
        for name, step, span in (("theta", self.theta_step_deg, 90), ("phi", self.phi_step_deg, 360)):
            if not step > 0:
                raise ValueError(f"{name} step must be positive")
            n = span / step
            if abs(n - round(n)) > 1e-9:
                raise ValueError(f"{name} step {step} does not divide {span}")

    @property
    def n_theta(self) -> int:
        return int(round(90 / self.theta_step_deg)) + 1

    @property
    def n_phi(self) -> int:
        return int(round(360 / self.phi_step_deg))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @cached_property
    def thetas(self) -> np.ndarray:
        return np.arange(self.n_theta) * self.theta_step_deg

    @cached_property
    def phis(self) -> np.ndarray:
        return np.arange(self.n_phi) * self.phi_step_deg

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(theta, phi) in degrees, each of shape ``self.shape``."""
        return np.meshgrid(self.thetas, self.phis, indexing="ij")

    def index_of(self, d: Direction) -> tuple[int, int]:
        """Nearest grid cell to ``d``."""
        i = int(round(d.theta_deg / self.theta_step_deg))
        j = int(round(d.phi_deg / self.phi_step_deg)) % self.n_phi
        return min(i, self.n_theta - 1), j


def wrapped_phi_difference(a, b):
    """Minimal azimuth separation in degrees, in [0, 180]."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 360.0
    return np.minimum(diff, 360.0 - diff)


def _planar_distance(t1, p1, t2, p2):
    dphi = wrapped_phi_difference(p1, p2)
    # broadside has no azimuth
    dphi = np.where((np.asarray(t1) == 0) | (np.asarray(t2) == 0), 0.0, dphi)
    return np.hypot(np.asarray(t1, dtype=float) - t2, dphi)


def angular_distance(a: Direction, b: Direction) -> float:
    """Planar (θ, φ) distance with azimuth wraparound, in degrees."""
    return float(_planar_distance(a.theta_deg, a.phi_deg, b.theta_deg, b.phi_deg))


def distance_map(grid: AngularGrid, d: Direction) -> np.ndarray:
    """``angular_distance`` from every grid cell to ``d``."""
    th, ph = grid.mesh
    return _planar_distance(th, ph, d.theta_deg, d.phi_deg)


def element_offsets(cfg: ArrayConfig, x: int, y: int) -> tuple[float, float]:
    if not (0 <= x < cfg.elements_x and 0 <= y < cfg.elements_y):
        raise IndexError(f"element [{x}, {y}] outside {cfg.elements_x}x{cfg.elements_y} array")
    return x * cfg.pitch_m, y * cfg.pitch_m
