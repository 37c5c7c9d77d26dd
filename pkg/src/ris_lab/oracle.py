"""Brute-force (delta, xi) search and pattern-engine certification, independent of the DQN."""

from __future__ import annotations

import itertools
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ris_lab.env import Scenario
from ris_lab.farfield import pattern, pattern_reference
from ris_lab.geometry import AngularGrid, ArrayConfig
from ris_lab.suppression import SuppressionAssignment
from ris_lab.synthesis import ReflectionProfile

COARSE_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)
EXHAUSTIVE_MAX_M = 2


@dataclass
class OracleResult:
    best: SuppressionAssignment
    best_objective: float
    baseline_objective: float
    evaluations: int
    mode: str
    history: list[tuple[SuppressionAssignment, float]] = field(default_factory=list)

    @property
    def improvement(self) -> float:
        return self.best_objective - self.baseline_objective


def _score(scenario: Scenario, assignment: SuppressionAssignment) -> float:
    return scenario.evaluate(assignment)[1]


def grid_search(scenario: Scenario, values: Sequence[float] = COARSE_VALUES, seed: int | None = None,
                mode: str = "auto", executor: Executor | None = None) -> OracleResult:
    """Best (delta, xi) per sidelobe by the objective, masks fixed by ``seed``.

    ``mode="auto"`` enumerates all ``len(values)**(2M)`` assignments when M <= 2
    and otherwise runs coordinate descent (one sidelobe's pair at a time, in
    order, until a full sweep brings no strict improvement). Ties keep the
    earliest assignment in enumeration order.
    """
    seed = scenario.mask_seed if seed is None else seed
    M = scenario.M
    pairs = list(itertools.product(values, values))
    if mode == "auto":
        mode = "exhaustive" if M <= EXHAUSTIVE_MAX_M else "coordinate"
    identity = SuppressionAssignment.identity(M, seed)
    baseline = _score(scenario, identity)
    if M == 0:
        return OracleResult(identity, baseline, baseline, 1, mode, [(identity, baseline)])

    mapper = executor.map if executor is not None else map
    history: list[tuple[SuppressionAssignment, float]] = []

    if mode == "exhaustive":
        cands = [SuppressionAssignment(c, seed) for c in itertools.product(pairs, repeat=M)]
        scores = list(mapper(lambda a: _score(scenario, a), cands))
        history = list(zip(cands, scores))
        best_i = int(np.argmax(scores))
        return OracleResult(cands[best_i], scores[best_i], baseline, len(cands), mode, history)

    if mode != "coordinate":
        raise ValueError(f"unknown mode {mode!r}")
    current = list(identity.entries)
    best = baseline
    history.append((identity, baseline))
    evaluations = 1
    improved = True
    while improved:
        improved = False
        for m in range(M):
            cands = []
            for p in pairs:
                trial = list(current)
                trial[m] = p
                cands.append(SuppressionAssignment(tuple(trial), seed))
            scores = list(mapper(lambda a: _score(scenario, a), cands))
            evaluations += len(cands)
            history.extend(zip(cands, scores))
            i = int(np.argmax(scores))
            if scores[i] > best + 1e-12:
                best = scores[i]
                current = list(cands[i].entries)
                improved = True
    return OracleResult(SuppressionAssignment(tuple(current), seed), best, baseline, evaluations, mode, history)


def mask_spread(scenario: Scenario, assignment: SuppressionAssignment, seeds: Sequence[int]) -> list[float]:
    """Objective of the same (delta, xi) entries under different mask seeds."""
    return [_score(scenario, SuppressionAssignment(assignment.entries, s)) for s in seeds]


@dataclass
class EngineReport:
    max_rel_error: dict[tuple[int, int], float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(e <= self.tolerance for e in self.max_rel_error.values())


def relative_error(fast: np.ndarray, ref: np.ndarray) -> float:
    """max |fast - ref| / max(|ref|, 1); element-scale floor keeps nulls from dominating."""
    return float(np.max(np.abs(fast - ref) / np.maximum(np.abs(ref), 1.0)))


def certify_engine(sizes: Sequence[tuple[int, int]], trials: int = 100, seed: int = 0,
                   grid: AngularGrid | None = None, bits: int = 2, tolerance: float = 1e-9,
                   frequency_hz: float = 3.5e9, pitch_m: float = 0.017) -> EngineReport:
    """Compare :func:`pattern` against :func:`pattern_reference` on random quantized profiles."""
    grid = grid or AngularGrid(5.0, 5.0)
    rng = np.random.default_rng(seed)
    errors = {}
    for X, Y in sizes:
        cfg = ArrayConfig(X, Y, pitch_m, frequency_hz, bits)
        worst = 0.0
        for _ in range(trials):
            prof = ReflectionProfile(rng.uniform(0, 2 * np.pi, size=(X, Y)), bits)
            fast = pattern(cfg, prof, grid).magnitude
            ref = pattern_reference(cfg, prof, grid).magnitude
            worst = max(worst, relative_error(fast, ref))
        errors[(X, Y)] = worst
    return EngineReport(errors, tolerance)
