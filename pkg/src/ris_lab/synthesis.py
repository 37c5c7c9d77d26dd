"""Single-focus phase compensation, multi-focus superposition and phase quantization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ris_lab.geometry import ArrayConfig, Direction

TWO_PI = 2.0 * np.pi
ZERO_FIELD = 1e-12

SUPERPOSE_METHODS = ("mean", "phasor")


def quantize(phases, bits: int) -> np.ndarray:
    """Map phases to the nearest of ``2**bits`` uniform levels ``i * 2π / 2**bits``.

    Exact midpoints go to the lower level; the top half-step wraps to level 0.
    """
    if not 1 <= bits <= 8:
        raise ValueError("bits must be in [1, 8]")
    levels = 1 << bits
    step = TWO_PI / levels
    p = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    idx = np.ceil(p / step - 0.5).astype(np.int64) % levels
    return idx * step


@dataclass(frozen=True)
class ReflectionProfile:
    """Per-element continuous and quantized phases of a phase-only array (unit amplitude)."""

    phases_rad: np.ndarray
    bits: int
    quantized_rad: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        p = np.mod(np.asarray(self.phases_rad, dtype=float), TWO_PI)
        p.setflags(write=False)
        object.__setattr__(self, "phases_rad", p)
        if self.quantized_rad is None:
            q = quantize(p, self.bits)
        else:
            q = np.asarray(self.quantized_rad, dtype=float)
            if q.shape != p.shape:
                raise ValueError("quantized and continuous phase shapes differ")
        q.setflags(write=False)
        object.__setattr__(self, "quantized_rad", q)

    @property
    def shape(self) -> tuple[int, int]:
        return self.phases_rad.shape

    @property
    def amplitude(self) -> np.ndarray:
        return np.ones(self.shape)

    def phasors(self, quantized: bool = True) -> np.ndarray:
        return np.exp(1j * (self.quantized_rad if quantized else self.phases_rad))

    def requantized(self, bits: int) -> ReflectionProfile:
        return ReflectionProfile(self.phases_rad, bits)


def _opd_matrix(cfg: ArrayConfig, d: Direction) -> np.ndarray:
    u, v = d.direction_cosines()
    x = np.arange(cfg.elements_x)[:, None] * cfg.pitch_m
    y = np.arange(cfg.elements_y)[None, :] * cfg.pitch_m
    return x * u + y * v


def single_focus_phases(cfg: ArrayConfig, incident: Direction, target: Direction) -> np.ndarray:
    """Continuous compensation phases steering a plane wave from ``incident`` to ``target``."""
    k = cfg.wavenumber
    return np.mod(-k * (_opd_matrix(cfg, target) - _opd_matrix(cfg, incident)), TWO_PI)


def single_focus_profile(cfg: ArrayConfig, incident: Direction, target: Direction) -> ReflectionProfile:
    return ReflectionProfile(single_focus_phases(cfg, incident, target), cfg.phase_bits)


def phase_of(field_: np.ndarray) -> np.ndarray:
    """arg() in [0, 2π), with 0 where the complex field has (numerically) cancelled."""
    phase = np.mod(np.angle(field_), TWO_PI)
    phase[np.abs(field_) < ZERO_FIELD] = 0.0
    return phase


def superposed_phases(phase_maps: Sequence[np.ndarray], method: str = "mean") -> np.ndarray:
    """Overlay continuous phase maps into one multi-focus phase map.

    ``"mean"`` averages the wrapped [0, 2π) phase values element-wise. The 2π
    wrap discontinuities of each sub-profile are what produce the combination
    lobes (e.g. the rhombus-shaped region steering toward the sum direction).
    ``"phasor"`` takes the argument of the unit-phasor sum instead.
    """
    if not phase_maps:
        raise ValueError("need at least one profile")
    shape = np.shape(phase_maps[0])
    for p in phase_maps:
        if np.shape(p) != shape:
            raise ValueError(f"profile shape {np.shape(p)} != {shape}")
    if method == "mean":
        stacked = np.mod(np.stack([np.asarray(p, dtype=float) for p in phase_maps]), TWO_PI)
        return np.mod(stacked.mean(axis=0), TWO_PI)
    if method == "phasor":
        return phase_of(sum(np.exp(1j * np.asarray(p, dtype=float)) for p in phase_maps))
    raise ValueError(f"unknown superposition method {method!r}; expected one of {SUPERPOSE_METHODS}")


def superpose(profiles: Sequence[ReflectionProfile], method: str = "mean") -> ReflectionProfile:
    if not profiles:
        raise ValueError("need at least one profile")
    phases = superposed_phases([p.phases_rad for p in profiles], method)
    return ReflectionProfile(phases, profiles[0].bits)
