"""JSON experiment configuration and scenario construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

from ris_lab.analysis import BeamSet
from ris_lab.dqn import AgentConfig
from ris_lab.env import ActionGrid, Scenario
from ris_lab.geometry import AngularGrid, ArrayConfig, Direction

PRESETS = ("fig3", "sec5_1bit", "sec5_2bit", "sec5_3bit", "single_focus")
DEFAULT_VALUES = tuple(i / 10 for i in range(11))
ORACLE_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    array: ArrayConfig
    incident: Direction
    targets: tuple[Direction, ...]
    radius_deg: float = 10.0
    count_specular: bool = False
    grid: AngularGrid = field(default_factory=AngularGrid)
    margin_db: float = 10.0
    max_count: int = 4
    actions: ActionGrid = field(default_factory=ActionGrid)
    mask_mode: str = "resample"
    mask_seed: int | None = None
    superposition: str = "mean"
    removal: str = "projected"
    oracle_values: tuple[float, ...] = ORACLE_VALUES
    agent: AgentConfig = field(default_factory=AgentConfig)
    seed: int = 0
    name: str = "experiment"

    @property
    def specular(self) -> Direction:
        return Direction(self.incident.theta_deg, self.incident.phi_deg + 180.0)

    def beams(self) -> BeamSet:
        excluded = () if self.count_specular else (self.specular,)
        return BeamSet(self.targets, self.radius_deg, excluded)

    def scenario(self, seed: int | None = None, grid: AngularGrid | None = None) -> Scenario:
        run_seed = self.seed if seed is None else seed
        return Scenario(
            self.array, self.incident, self.beams(), grid or self.grid,
            margin_db=self.margin_db, max_count=self.max_count, actions=self.actions,
            mask_mode=self.mask_mode,
            mask_seed=run_seed if self.mask_seed is None else self.mask_seed,
            superposition=self.superposition, removal=self.removal,
        )


def _direction(v, where: str) -> Direction:
    try:
        if isinstance(v, dict):
            return Direction(float(v["theta_deg"]), float(v["phi_deg"]))
        theta, phi = v
        return Direction(float(theta), float(phi))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{where}: expected [theta_deg, phi_deg], got {v!r} ({exc})") from None


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"section {key!r} must be an object")
    return sec


def from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    try:
        arr = _section(raw, "array")
        array = ArrayConfig(
            int(arr.get("X", arr.get("elements_x", 50))),
            int(arr.get("Y", arr.get("elements_y", 50))),
            float(arr.get("pitch_m", 0.017)),
            float(arr.get("frequency_hz", 3.5e9)),
            int(arr.get("phase_bits", 2)),
        )
        bm = _section(raw, "beams")
        if "targets" not in bm or not bm["targets"]:
            raise ConfigError("beams.targets must list at least one [theta, phi]")
        targets = tuple(_direction(t, "beams.targets") for t in bm["targets"])
        incident = _direction(bm.get("incident", [0.0, 0.0]), "beams.incident")
        gr = _section(raw, "grid")
        grid = AngularGrid(float(gr.get("theta_step", 1.0)), float(gr.get("phi_step", 1.0)))
        det = _section(raw, "detect")
        sup = _section(raw, "suppress")
        actions = ActionGrid(tuple(sup.get("delta_values", DEFAULT_VALUES)),
                             tuple(sup.get("xi_values", DEFAULT_VALUES)))
        ag = dict(_section(raw, "agent"))
        known = {f.name for f in fields(AgentConfig)}
        unknown = set(ag) - known
        if unknown:
            raise ConfigError(f"unknown agent fields: {sorted(unknown)}")
        if "hidden" in ag:
            ag["hidden"] = tuple(ag["hidden"])
        agent = AgentConfig(**ag)
        mask_mode = sup.get("mask_mode", "resample")
        if mask_mode not in ("fixed", "resample"):
            raise ConfigError("suppress.mask_mode must be 'fixed' or 'resample'")
        cfg = ExperimentConfig(
            array=array, incident=incident, targets=targets,
            radius_deg=float(bm.get("radius_deg", 10.0)),
            count_specular=bool(bm.get("count_specular", False)),
            grid=grid,
            margin_db=float(det.get("margin_db", 10.0)),
            max_count=int(det.get("max_count", 4)),
            actions=actions, mask_mode=mask_mode,
            mask_seed=sup.get("mask_seed"),
            superposition=sup.get("superposition", "mean"),
            removal=sup.get("removal", "projected"),
            oracle_values=tuple(float(v) for v in _section(raw, "oracle").get("values", ORACLE_VALUES)),
            agent=agent,
            seed=int(raw.get("seed", 0)),
            name=str(raw.get("name", "experiment")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if cfg.superposition not in ("mean", "phasor"):
        raise ConfigError("suppress.superposition must be 'mean' or 'phasor'")
    if cfg.removal not in ("projected", "unit"):
        raise ConfigError("suppress.removal must be 'projected' or 'unit'")
    return cfg


def preset_text(name: str) -> str:
    return resources.files("ris_lab.presets").joinpath(f"{name}.json").read_text()


def load_config(path_or_preset: str | Path) -> ExperimentConfig:
    """Load a JSON config file, or a bundled preset by bare name (e.g. ``sec5_2bit``)."""
    p = Path(path_or_preset)
    if p.exists():
        text = p.read_text()
    elif str(path_or_preset) in PRESETS:
        text = preset_text(str(path_or_preset))
    else:
        raise ConfigError(f"no such config file or preset: {path_or_preset}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path_or_preset}: invalid JSON ({exc})") from None
    return from_dict(raw)
