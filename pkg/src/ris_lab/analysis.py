"""Intended-beam / unwanted-lobe intensities, the suppression objective and sidelobe detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ris_lab.farfield import DB_FLOOR, FarFieldPattern, to_db
from ris_lab.geometry import AngularGrid, Direction, angular_distance, distance_map


@dataclass(frozen=True)
class BeamSet:
    """Intended beam directions and the radius of their acceptance circles.

    ``excluded`` directions carve out cones (true angular radius ``radius_deg``)
    that count neither as intended nor as unwanted, e.g. the specular
    reflection of the incident wave.
    """

    targets: tuple[Direction, ...]
    radius_deg: float = 10.0
    excluded: tuple[Direction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "excluded", tuple(self.excluded))
        if not self.targets:
            raise ValueError("need at least one intended beam")
        if not self.radius_deg > 0:
            raise ValueError("radius_deg must be positive")

    def __len__(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class Sidelobe:
    direction: Direction
    intensity_db: float


@dataclass(frozen=True)
class SidelobeSet:
    lobes: tuple[Sidelobe, ...]
    radius_deg: float = 10.0

    def __len__(self) -> int:
        return len(self.lobes)

    def __iter__(self):
        return iter(self.lobes)

    @property
    def directions(self) -> list[Direction]:
        return [lobe.direction for lobe in self.lobes]


def great_circle_map(grid: AngularGrid, d: Direction) -> np.ndarray:
    """True angle (degrees) between every grid direction and ``d``."""
    th, ph = (np.radians(a) for a in grid.mesh)
    t0, p0 = d.theta_rad, d.phi_rad
    c = np.sin(th) * math.sin(t0) * np.cos(ph - p0) + np.cos(th) * math.cos(t0)
    return np.degrees(np.arccos(np.clip(c, -1.0, 1.0)))


@lru_cache(maxsize=64)
def beam_regions(grid: AngularGrid, beams: BeamSet) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Boolean masks of each intended circle and of the unwanted region."""
    circles = []
    unwanted = np.ones(grid.shape, dtype=bool)
    for t in beams.targets:
        m = distance_map(grid, t) <= beams.radius_deg
        m.setflags(write=False)
        circles.append(m)
        unwanted &= ~m
    for e in beams.excluded:
        unwanted &= great_circle_map(grid, e) > beams.radius_deg
    unwanted.setflags(write=False)
    return tuple(circles), unwanted


def intended_peaks(p: FarFieldPattern, beams: BeamSet) -> list[float]:
    """Peak linear magnitude inside each intended circle."""
    circles, _ = beam_regions(p.grid, beams)
    peaks = []
    for t, m in zip(beams.targets, circles):
        if not m.any():
            raise ValueError(f"no grid cell within {beams.radius_deg} deg of target {t}")
        peaks.append(float(p.magnitude[m].max()))
    return peaks


def intended_intensity(p: FarFieldPattern, beams: BeamSet) -> float:
    """Weakest of the intended-beam peaks, in dB."""
    return to_db(min(intended_peaks(p, beams)), p.reference)


def unwanted_peak(p: FarFieldPattern, beams: BeamSet) -> float:
    _, unwanted = beam_regions(p.grid, beams)
    if not unwanted.any():
        return 0.0
    return float(p.magnitude[unwanted].max())


def unwanted_intensity(p: FarFieldPattern, beams: BeamSet) -> float:
    """Strongest cell outside every intended circle (and excluded cone), in dB."""
    return to_db(unwanted_peak(p, beams), p.reference)


def objective(p: FarFieldPattern, beams: BeamSet) -> float:
    return intended_intensity(p, beams) - unwanted_intensity(p, beams)


def strict_local_maxima(values: np.ndarray) -> np.ndarray:
    """Strict 8-neighbour maxima on a (theta, phi) grid, phi periodic.

    Row 0 is broadside: all its cells are the same physical direction, so only
    ``[0, 0]`` can be a candidate and it is compared against the whole next row.
    """
    v = np.asarray(values, dtype=float)
    nt, nphi = v.shape
    padded = np.pad(v, ((1, 1), (0, 0)), constant_values=-np.inf)
    is_max = np.ones_like(v, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            if nphi == 1 and dj != 0:
                continue
            nb = np.roll(padded, -dj, axis=1)[1 + di:1 + di + nt]
            is_max &= v > nb
    is_max[0, :] = False
    if nt > 1:
        is_max[0, 0] = bool(v[0, 0] > v[1].max())
    else:
        is_max[0, 0] = False
    return is_max


def detect_sidelobes(p: FarFieldPattern, beams: BeamSet, margin_db: float = 10.0,
                     max_count: int = 4) -> SidelobeSet:
    """Greedy pick of the strongest out-of-circle local maxima within ``margin_db`` of the intended level."""
    if not margin_db > 0:
        raise ValueError("margin_db must be positive")
    if max_count < 1:
        raise ValueError("max_count must be >= 1")
    _, unwanted = beam_regions(p.grid, beams)
    floor = intended_intensity(p, beams) - margin_db
    db = p.db
    cand = strict_local_maxima(p.magnitude) & unwanted & (db >= floor)
    ii, jj = np.nonzero(cand)
    order = np.lexsort((jj, ii, -p.magnitude[ii, jj]))
    chosen: list[Sidelobe] = []
    for k in order:
        d = Direction(float(p.grid.thetas[ii[k]]), float(p.grid.phis[jj[k]]))
        if all(angular_distance(d, c.direction) >= beams.radius_deg for c in chosen):
            chosen.append(Sidelobe(d, float(db[ii[k], jj[k]])))
            if len(chosen) == max_count:
                break
    return SidelobeSet(tuple(chosen), beams.radius_deg)


__all__ = [
    "DB_FLOOR",
    "BeamSet",
    "Sidelobe",
    "SidelobeSet",
    "beam_regions",
    "detect_sidelobes",
    "intended_intensity",
    "intended_peaks",
    "objective",
    "strict_local_maxima",
    "unwanted_intensity",
]
