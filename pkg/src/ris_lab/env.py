"""Sidelobe-suppression environment and the DQN training loop.

An episode assigns one ``(delta, xi)`` action per detected sidelobe, in order;
the terminal reward is the intended-minus-unwanted objective (dB) of the
suppressed pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ris_lab.analysis import BeamSet, SidelobeSet, beam_regions, detect_sidelobes, objective
from ris_lab.dqn import Agent, AgentConfig, Mlp, select_action
from ris_lab.farfield import FarFieldPattern, SteeringTables, grid_tables, pattern, to_db
from ris_lab.geometry import AngularGrid, ArrayConfig, Direction, distance_map
from ris_lab.suppression import Suppressor, SuppressionAssignment
from ris_lab.synthesis import ReflectionProfile, single_focus_phases

UNASSIGNED = -1.0
DB_SCALE = 40.0


@dataclass(frozen=True)
class ActionGrid:
    delta_values: tuple[float, ...] = tuple(np.round(np.linspace(0, 1, 11), 10))
    xi_values: tuple[float, ...] = tuple(np.round(np.linspace(0, 1, 11), 10))

    def __post_init__(self):
        for name in ("delta_values", "xi_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
                raise ValueError(f"{name} must be a non-empty list in [0, 1]")
            object.__setattr__(self, name, vals)

    @property
    def action_count(self) -> int:
        return len(self.delta_values) * len(self.xi_values)

    def pair(self, index: int) -> tuple[float, float]:
        if not 0 <= index < self.action_count:
            raise IndexError(f"action {index} outside [0, {self.action_count})")
        i, j = divmod(index, len(self.xi_values))
        return self.delta_values[i], self.xi_values[j]

    def index(self, delta: float, xi: float) -> int:
        return self.delta_values.index(delta) * len(self.xi_values) + self.xi_values.index(xi)


class Scenario:
    """Everything fixed before training: profiles, detected sidelobes, removal terms, baseline."""

    def __init__(self, cfg: ArrayConfig, incident: Direction, beams: BeamSet, grid: AngularGrid,
                 margin_db: float = 10.0, max_count: int = 4, actions: ActionGrid | None = None,
                 mask_mode: str = "resample", mask_seed: int = 0, superposition: str = "mean",
                 removal: str = "projected", sidelobes: SidelobeSet | None = None):
        if mask_mode not in ("fixed", "resample"):
            raise ValueError(f"mask_mode must be 'fixed' or 'resample', got {mask_mode!r}")
        self.cfg, self.incident, self.beams, self.grid = cfg, incident, beams, grid
        self.actions = actions or ActionGrid()
        self.mask_mode = mask_mode
        self.mask_seed = int(mask_seed)
        self.single_phases = [single_focus_phases(cfg, incident, t) for t in beams.targets]
        base = Suppressor(cfg, self.single_phases, [], superposition, removal)
        self.baseline_profile = ReflectionProfile(base.base_phases, cfg.phase_bits)
        self.baseline_pattern = pattern(cfg, self.baseline_profile, grid)
        if sidelobes is None:
            sidelobes = detect_sidelobes(self.baseline_pattern, beams, margin_db, max_count)
        self.sidelobes = sidelobes
        self.sidelobe_phases = [single_focus_phases(cfg, incident, d) for d in sidelobes.directions]
        self.suppressor = Suppressor(cfg, self.single_phases, self.sidelobe_phases, superposition, removal)
        self.baseline_objective = objective(self.baseline_pattern, beams)
        self._probe = _ProbeSet(cfg, grid, beams, sidelobes)

    @property
    def T(self) -> int:
        return len(self.beams)

    @property
    def M(self) -> int:
        return len(self.sidelobes)

    @property
    def state_dim(self) -> int:
        return self.T + 2 * self.M

    def assignment(self, actions: Sequence[int], mask_seed: int | None = None) -> SuppressionAssignment:
        seed = self.mask_seed if mask_seed is None else mask_seed
        return SuppressionAssignment(tuple(self.actions.pair(a) for a in actions), seed)

    def profile(self, assignment: SuppressionAssignment) -> ReflectionProfile:
        return self.suppressor.profile(assignment)

    def evaluate(self, assignment: SuppressionAssignment) -> tuple[FarFieldPattern, float]:
        p = pattern(self.cfg, self.profile(assignment), self.grid)
        return p, objective(p, self.beams)

    def probe_db(self, profile: ReflectionProfile) -> tuple[list[float], list[float]]:
        return self._probe.intensities(profile.quantized_rad)

    def pattern_db(self, p: FarFieldPattern) -> tuple[list[float], list[float]]:
        return self._probe.from_pattern(p)


class _ProbeSet:
    """Evaluates the field only on cells inside intended and sidelobe circles."""

    def __init__(self, cfg: ArrayConfig, grid: AngularGrid, beams: BeamSet, sidelobes: SidelobeSet):
        self.norm = float(cfg.size)
        circles, _ = beam_regions(grid, beams)
        masks = list(circles) + [distance_map(grid, d) <= beams.radius_deg for d in sidelobes.directions]
        union = np.zeros(grid.shape, dtype=bool)
        for m in masks:
            union |= m
        self.cells = np.nonzero(union.ravel())[0]
        self.masks = masks
        self.local = [m.ravel()[self.cells] for m in masks]
        th, ph = grid.mesh
        self.tables = SteeringTables(cfg, th.ravel()[self.cells], ph.ravel()[self.cells])
        self.n_beams = len(circles)

    def _split(self, peaks: list[float]):
        db = [to_db(v, self.norm) for v in peaks]
        return db[:self.n_beams], db[self.n_beams:]

    def intensities(self, phases: np.ndarray):
        mag = self.tables.magnitude(phases)
        return self._split([float(mag[m].max()) for m in self.local])

    def from_pattern(self, p: FarFieldPattern):
        return self._split([float(p.magnitude[m].max()) for m in self.masks])


class SuppressionEnv:
    """Episode = M steps; step m fixes (delta_m, xi_m) for the m-th detected sidelobe."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.T, self.M = scenario.T, scenario.M
        intended, side = scenario.pattern_db(scenario.baseline_pattern)
        self._initial = np.array(intended + [v for s in side for v in (s, UNASSIGNED)])
        self.actions_taken: list[int] = []
        self.mask_seed = scenario.mask_seed
        self.state = self._initial.copy()
        self.done = True
        self.last_pattern: FarFieldPattern | None = None

    @property
    def state_dim(self) -> int:
        return self.T + 2 * self.M

    @property
    def action_count(self) -> int:
        return self.scenario.actions.action_count

    def reset(self, mask_seed: int | None = None) -> np.ndarray:
        """Back to the unsuppressed profile. ``mask_seed`` is used in resample mode only."""
        sc = self.scenario
        self.mask_seed = mask_seed if (sc.mask_mode == "resample" and mask_seed is not None) else sc.mask_seed
        self.actions_taken = []
        self.state = self._initial.copy()
        self.done = self.M == 0
        self.last_pattern = sc.baseline_pattern if self.done else None
        return self.state.copy()

    def _assignment(self) -> SuppressionAssignment:
        acts = self.actions_taken + [None] * (self.M - len(self.actions_taken))
        pairs = tuple((0.0, 0.0) if a is None else self.scenario.actions.pair(a) for a in acts)
        return SuppressionAssignment(pairs, self.mask_seed)

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise RuntimeError("step() called on a finished episode; call reset()")
        sc = self.scenario
        m = len(self.actions_taken)
        sc.actions.pair(action)
        self.actions_taken.append(int(action))
        profile = sc.profile(self._assignment())
        terminal = len(self.actions_taken) == self.M
        if terminal:
            self.last_pattern = pattern(sc.cfg, profile, sc.grid)
            intended, side = sc.pattern_db(self.last_pattern)
            reward = objective(self.last_pattern, sc.beams)
        else:
            intended, side = sc.probe_db(profile)
            reward = 0.0
        s = self.state
        s[:self.T] = intended
        s[self.T::2] = side
        s[self.T + 1 + 2 * m] = action / max(self.action_count - 1, 1)
        self.done = terminal
        return s.copy(), float(reward), terminal

    def features(self, state: np.ndarray) -> np.ndarray:
        return standardize(state, self.T)


def standardize(state: np.ndarray, n_beams: int) -> np.ndarray:
    """Network input: dB entries scaled by 1/40, combination coefficients unchanged."""
    f = np.array(state, dtype=float)
    f[:n_beams] /= DB_SCALE
    f[n_beams::2] /= DB_SCALE
    return f


@dataclass
class Rollout:
    actions: list[int]
    assignment: SuppressionAssignment
    objective: float
    pattern: FarFieldPattern
    net: Mlp | None = None


def greedy_rollout(net: Mlp, scenario: Scenario, mask_seed: int | None = None) -> Rollout:
    """epsilon = 0 episode with a fixed mask seed (the scenario's, by default)."""
    env = SuppressionEnv(scenario)
    state = env.reset()
    if mask_seed is not None:
        env.mask_seed = mask_seed
    actions: list[int] = []
    reward = scenario.baseline_objective
    while not env.done:
        a = select_action(net, env.features(state), 0.0, None)
        actions.append(a)
        state, reward, _ = env.step(a)
    assert env.last_pattern is not None
    return Rollout(actions, env._assignment(), reward, env.last_pattern, net.copy())


@dataclass
class TrainingLog:
    episode: list[int] = field(default_factory=list)
    epsilon: list[float] = field(default_factory=list)
    reward: list[float] = field(default_factory=list)
    mean_loss: list[float] = field(default_factory=list)

    def append(self, episode: int, epsilon: float, reward: float, mean_loss: float) -> None:
        self.episode.append(episode)
        self.epsilon.append(epsilon)
        self.reward.append(reward)
        self.mean_loss.append(mean_loss)

    def __len__(self) -> int:
        return len(self.episode)


@dataclass
class TrainingResult:
    log: TrainingLog
    agent: Agent | None
    baseline: float
    best_reward: float
    best_greedy: Rollout
    final_greedy: Rollout


def run_training(scenario: Scenario, agent_cfg: AgentConfig, episodes: int | None = None,
                 seed: int = 0, eval_interval: int = 20, forced_action: int | None = None,
                 fixed_epsilon: float | None = None) -> TrainingResult:
    """Training loop: epsilon-greedy episodes, replay learning, periodic target sync.

    Greedy (epsilon = 0) rollouts on the scenario's fixed mask seed run every
    ``eval_interval`` episodes and at the end; the best one is kept.
    """
    episodes = agent_cfg.episodes if episodes is None else episodes
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    env = SuppressionEnv(scenario)
    seeds = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(seeds[0])
    mask_rng = np.random.default_rng(seeds[1])
    log = TrainingLog()
    if scenario.M == 0:
        for ep in range(episodes):
            log.append(ep, agent_cfg.epsilon(ep, episodes), scenario.baseline_objective, math.nan)
        ro = Rollout([], scenario.assignment([]), scenario.baseline_objective, scenario.baseline_pattern)
        return TrainingResult(log, None, scenario.baseline_objective, scenario.baseline_objective, ro, ro)

    agent = Agent(env.state_dim, env.action_count, agent_cfg, rng)
    best_greedy: Rollout | None = None
    best_reward = -math.inf
    plateau = 0
    for ep in range(episodes):
        eps = agent_cfg.epsilon(ep, episodes) if fixed_epsilon is None else fixed_epsilon
        state = env.reset(int(mask_rng.integers(1 << 62)))
        losses = []
        reward = 0.0
        while not env.done:
            x = env.features(state)
            a = forced_action if forced_action is not None else agent.act(x, eps)
            state, reward, done = env.step(a)
            loss = agent.observe(x, a, reward, env.features(state), done)
            if loss is not None:
                losses.append(loss)
        log.append(ep, eps, reward, float(np.mean(losses)) if losses else math.nan)
        if reward > best_reward + 1e-9:
            best_reward, plateau = reward, 0
        else:
            plateau += 1
        if (ep + 1) % eval_interval == 0 or ep == episodes - 1:
            ro = greedy_rollout(agent.net, scenario)
            if best_greedy is None or ro.objective > best_greedy.objective:
                best_greedy = ro
        if agent_cfg.plateau_patience and plateau >= agent_cfg.plateau_patience:
            break
    final = greedy_rollout(agent.net, scenario)
    if best_greedy is None or final.objective > best_greedy.objective:
        best_greedy = final
    return TrainingResult(log, agent, scenario.baseline_objective, best_reward, best_greedy, final)
