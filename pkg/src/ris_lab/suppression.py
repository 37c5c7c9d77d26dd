"""Per-sidelobe (delta, xi) removal of sidelobe-steering components from a multi-focus profile."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ris_lab.geometry import ArrayConfig
from ris_lab.synthesis import ReflectionProfile, phase_of, superposed_phases

_MASK64 = (1 << 64) - 1
REMOVAL_MODES = ("projected", "unit")


@dataclass(frozen=True)
class SuppressionAssignment:
    """One ``(delta, xi)`` pair per detected sidelobe, plus the seed that regenerates the masks."""

    entries: tuple[tuple[float, float], ...]
    mask_seed: int = 0

    def __post_init__(self):
        entries = tuple((float(d), float(x)) for d, x in self.entries)
        for d, x in entries:
            if not (0.0 <= d <= 1.0 and 0.0 <= x <= 1.0):
                raise ValueError(f"(delta, xi)=({d}, {x}) outside [0, 1]^2")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "mask_seed", int(self.mask_seed) & _MASK64)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, count: int, mask_seed: int = 0) -> SuppressionAssignment:
        return cls(((0.0, 0.0),) * count, mask_seed)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform_field(seed: int, sidelobe_index: int, shape: tuple[int, int]) -> np.ndarray:
    """Uniform [0, 1) draw per element, a pure function of (seed, m, x, y)."""
    x = np.arange(shape[0], dtype=np.uint64)[:, None]
    y = np.arange(shape[1], dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        key = _splitmix64(np.uint64(seed & _MASK64) ^ _splitmix64(np.uint64(sidelobe_index)))
        h = _splitmix64(key ^ _splitmix64(x * np.uint64(0x100000001B3) ^ (y + np.uint64(0x632BE59BD9B4E019))))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def make_mask(seed: int, sidelobe_index: int, cfg: ArrayConfig, delta: float) -> np.ndarray:
    """Binary X x Y mask; each element is 1 with probability ``delta``."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must be in [0, 1]")
    return (uniform_field(seed, sidelobe_index, cfg.shape) < delta).astype(np.uint8)


class Suppressor:
    """Precomputed removal terms for one set of intended and sidelobe profiles.

    With ``removal="projected"`` each sidelobe phasor is weighted by its
    projection onto the multi-focus field, ``c_m = mean(exp(j(P_mul - P_side_m)))``,
    so ``delta = xi = 1`` cancels exactly that component. ``"unit"`` uses ``c_m = 1``.
    """

    def __init__(self, cfg: ArrayConfig, single_phases: Sequence[np.ndarray],
                 sidelobe_phases: Sequence[np.ndarray], method: str = "mean",
                 removal: str = "projected"):
        if removal not in REMOVAL_MODES:
            raise ValueError(f"unknown removal mode {removal!r}")
        for p in list(single_phases) + list(sidelobe_phases):
            if np.shape(p) != cfg.shape:
                raise ValueError(f"profile shape {np.shape(p)} does not match array {cfg.shape}")
        self.cfg = cfg
        self.base_phases = superposed_phases(single_phases, method)
        self.base_field = np.exp(1j * self.base_phases)
        side = [np.exp(1j * np.asarray(p, dtype=float)) for p in sidelobe_phases]
        if removal == "projected":
            self.coefficients = [complex(np.mean(self.base_field * np.conj(s))) for s in side]
        else:
            self.coefficients = [1.0 + 0j] * len(side)
        self.removal_terms = [c * s for c, s in zip(self.coefficients, side)]
        self._uniform_cache: dict[int, list[np.ndarray]] = {}

    @property
    def count(self) -> int:
        return len(self.removal_terms)

    def _uniforms(self, seed: int) -> list[np.ndarray]:
        u = self._uniform_cache.get(seed)
        if u is None:
            if len(self._uniform_cache) > 8:
                self._uniform_cache.clear()
            u = [uniform_field(seed, m, self.cfg.shape) for m in range(self.count)]
            self._uniform_cache[seed] = u
        return u

    def phases(self, assignment: SuppressionAssignment) -> np.ndarray:
        if len(assignment) != self.count:
            raise ValueError(f"assignment has {len(assignment)} entries for {self.count} sidelobes")
        out = self.base_phases.copy()
        uniforms = self._uniforms(assignment.mask_seed)
        field = self.base_field.copy()
        touched = np.zeros(self.cfg.shape, dtype=bool)
        for (delta, xi), term, u in zip(assignment.entries, self.removal_terms, uniforms):
            if delta * xi == 0.0:
                continue
            mask = u < delta
            field[mask] -= xi * term[mask]
            touched |= mask
        out[touched] = phase_of(field[touched])
        return out

    def profile(self, assignment: SuppressionAssignment) -> ReflectionProfile:
        return ReflectionProfile(self.phases(assignment), self.cfg.phase_bits)


def apply_suppression(single_profiles: Sequence[ReflectionProfile],
                      sidelobe_profiles: Sequence[ReflectionProfile],
                      assignment: SuppressionAssignment, cfg: ArrayConfig,
                      method: str = "mean", removal: str = "projected") -> ReflectionProfile:
    """Superpose the intended profiles and remove ``xi_m * mask_m(delta_m)`` of each sidelobe component."""
    if len(assignment) != len(sidelobe_profiles):
        raise ValueError(f"{len(assignment)} assignment entries for {len(sidelobe_profiles)} sidelobe profiles")
    sup = Suppressor(cfg, [p.phases_rad for p in single_profiles],
                     [p.phases_rad for p in sidelobe_profiles], method, removal)
    return sup.profile(assignment)
