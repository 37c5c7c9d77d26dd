"""Far-field array factor of a quantized reflection profile.

The optimized path factorizes the per-direction double sum over elements as
``sum_x Ux[x] * (A @ Vy)[x]`` with ``A = exp(j*phase)`` and per-axis steering
tables ``Ux``, ``Vy``; one complex matrix product per pattern.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ris_lab.geometry import AngularGrid, ArrayConfig, Direction, element_offsets
from ris_lab.synthesis import ReflectionProfile

DB_FLOOR = -400.0


@dataclass(frozen=True)
class FarFieldPattern:
    grid: AngularGrid
    magnitude: np.ndarray
    reference: float = 1.0

    def __post_init__(self):
        if not self.reference > 0:
            raise ValueError("dB reference must be positive")
        if self.magnitude.shape != self.grid.shape:
            raise ValueError(f"magnitude shape {self.magnitude.shape} != grid {self.grid.shape}")

    @property
    def db(self) -> np.ndarray:
        return to_db(self.magnitude, self.reference)

    @property
    def peak(self) -> float:
        return float(self.magnitude.max())

    def peak_direction(self) -> Direction:
        i, j = np.unravel_index(int(np.argmax(self.magnitude)), self.magnitude.shape)
        return Direction(float(self.grid.thetas[i]), float(self.grid.phis[j]))

    def scaled(self, factor: float) -> FarFieldPattern:
        return FarFieldPattern(self.grid, self.magnitude * factor, self.reference * factor)


def to_db(magnitude, reference: float = 1.0):
    """20 log10(|E| / reference), with exact zeros mapped to ``DB_FLOOR``."""
    m = np.asarray(magnitude, dtype=float)
    out = np.full(m.shape, DB_FLOOR)
    pos = m > 0
    out[pos] = 20.0 * np.log10(m[pos] / reference)
    return out if out.ndim else float(out)


def normalize_db(p: FarFieldPattern, reference: float) -> FarFieldPattern:
    """Return ``p`` with its dB view referenced to ``reference`` (linear magnitude)."""
    if not reference > 0:
        raise ValueError("reference must be positive")
    return replace(p, reference=float(reference))


def opd(cfg: ArrayConfig, x: int, y: int, d: Direction) -> float:
    """Optical path difference of element [x, y] toward ``d``, in meters."""
    dx, dy = element_offsets(cfg, x, y)
    st = math.sin(d.theta_rad)
    return dx * math.cos(d.phi_rad) * st + dy * math.sin(d.phi_rad) * st


def _check_dims(cfg: ArrayConfig, profile: ReflectionProfile) -> None:
    if profile.shape != cfg.shape:
        raise ValueError(f"profile shape {profile.shape} does not match array {cfg.shape}")


class SteeringTables:
    """Per-axis steering phasors ``exp(j k d n u)`` for a set of directions."""

    def __init__(self, cfg: ArrayConfig, thetas_deg: np.ndarray, phis_deg: np.ndarray):
        th = np.radians(np.asarray(thetas_deg, dtype=float)).ravel()
        ph = np.radians(np.asarray(phis_deg, dtype=float)).ravel()
        u = np.sin(th) * np.cos(ph)
        v = np.sin(th) * np.sin(ph)
        kd = cfg.wavenumber * cfg.pitch_m
        self.shape = np.shape(thetas_deg)
        self.ux = np.exp(1j * kd * np.arange(cfg.elements_x)[:, None] * u[None, :])
        self.vy = np.exp(1j * kd * np.arange(cfg.elements_y)[:, None] * v[None, :])

    def field(self, phases: np.ndarray) -> np.ndarray:
        partial = np.exp(1j * phases) @ self.vy
        return np.einsum("xp,xp->p", partial, self.ux).reshape(self.shape)

    def magnitude(self, phases: np.ndarray) -> np.ndarray:
        return np.abs(self.field(phases))


@lru_cache(maxsize=16)
def grid_tables(cfg: ArrayConfig, grid: AngularGrid) -> SteeringTables:
    th, ph = grid.mesh
    return SteeringTables(cfg, th, ph)


def pattern(cfg: ArrayConfig, profile: ReflectionProfile, grid: AngularGrid,
            quantized: bool = True) -> FarFieldPattern:
    """|E| over ``grid`` for the profile's quantized (default) or continuous phases."""
    _check_dims(cfg, profile)
    phases = profile.quantized_rad if quantized else profile.phases_rad
    mag = grid_tables(cfg, grid).magnitude(phases)
    peak = float(mag.max())
    return FarFieldPattern(grid, mag, peak if peak > 0 else 1.0)


def pattern_reference(cfg: ArrayConfig, profile: ReflectionProfile, grid: AngularGrid,
                      quantized: bool = True) -> FarFieldPattern:
    """Direct summation over directions and elements; ground truth for :func:`pattern`."""
    _check_dims(cfg, profile)
    phases = profile.quantized_rad if quantized else profile.phases_rad
    k = cfg.wavenumber
    mag = np.zeros(grid.shape)
    for i, theta in enumerate(grid.thetas):
        for j, phi in enumerate(grid.phis):
            d = Direction(float(theta), float(phi))
            total = 0j
            for x in range(cfg.elements_x):
                for y in range(cfg.elements_y):
                    total += cmath.exp(1j * (k * opd(cfg, x, y, d) + float(phases[x, y])))
            mag[i, j] = abs(total)
    peak = float(mag.max())
    return FarFieldPattern(grid, mag, peak if peak > 0 else 1.0)
