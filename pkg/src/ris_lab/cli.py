"""Command-line entry point: ``ris-lab {pattern,train,oracle,eval}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from struct import error as struct_error

from ris_lab import io
from ris_lab.analysis import detect_sidelobes, intended_peaks, objective
from ris_lab.config import ConfigError, ExperimentConfig, load_config
from ris_lab.dqn import load_checkpoint, save_checkpoint, select_action
from ris_lab.env import SuppressionEnv, run_training
from ris_lab.farfield import FarFieldPattern, normalize_db, pattern
from ris_lab.oracle import grid_search, mask_spread
from ris_lab.synthesis import ReflectionProfile, single_focus_profile, superpose

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_CHECKPOINT = 0, 2, 3, 4


class CheckpointMismatch(Exception):
    pass


def _normalized(p: FarFieldPattern, cfg: ExperimentConfig) -> FarFieldPattern:
    """dB view with the strongest intended beam at 0 dB."""
    return normalize_db(p, max(max(intended_peaks(p, cfg.beams())), 1e-300))


def _write_json(path: Path, data: dict) -> None:
    with io.atomic_open(path) as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_pattern(cfg: ExperimentConfig, out: Path, seed: int) -> dict:
    singles = [single_focus_profile(cfg.array, cfg.incident, t) for t in cfg.targets]
    profile = singles[0] if len(singles) == 1 else superpose(singles, cfg.superposition)
    p = pattern(cfg.array, profile, cfg.grid)
    beams = cfg.beams()
    lobes = detect_sidelobes(p, beams, cfg.margin_db, cfg.max_count)
    io.write_profile(out / "profile.csv", profile)
    io.write_pattern(out / "pattern.csv", _normalized(p, cfg))
    io.write_sidelobes(out / "sidelobes.csv", lobes)
    peak = p.peak_direction()
    summary = {"objective_db": objective(p, beams), "peak_theta_deg": peak.theta_deg,
               "peak_phi_deg": peak.phi_deg, "sidelobes": len(lobes)}
    _write_json(out / "pattern_summary.json", summary)
    return summary


def _write_rollout(out: Path, cfg: ExperimentConfig, scenario, rollout) -> None:
    io.write_profile(out / "suppressed_profile.csv", scenario.profile(rollout.assignment))
    io.write_pattern(out / "suppressed_pattern.csv", _normalized(rollout.pattern, cfg))
    io.write_assignment(out / "assignment.csv", rollout.assignment)


def cmd_train(cfg: ExperimentConfig, out: Path, seed: int, episodes: int | None = None) -> dict:
    scenario = cfg.scenario(seed)
    result = run_training(scenario, cfg.agent, episodes, seed)
    io.write_training_log(out / "training_log.csv", result.log)
    io.write_sidelobes(out / "sidelobes.csv", scenario.sidelobes)
    best = result.best_greedy
    if best.net is not None:
        save_checkpoint(out / "agent.risq", best.net, result.agent.optimizer if result.agent else None)
    _write_rollout(out, cfg, scenario, best)
    summary = {"baseline_db": result.baseline, "best_greedy_db": best.objective,
               "final_greedy_db": result.final_greedy.objective, "best_reward_db": result.best_reward,
               "episodes": len(result.log), "sidelobes": scenario.M, "seed": seed}
    _write_json(out / "train_summary.json", summary)
    return summary


def cmd_oracle(cfg: ExperimentConfig, out: Path, seed: int) -> dict:
    scenario = cfg.scenario(seed)
    res = grid_search(scenario, cfg.oracle_values, scenario.mask_seed)
    io.write_oracle_report(out / "oracle_report.csv", res.history)
    best_pattern, _ = scenario.evaluate(res.best)
    io.write_pattern(out / "oracle_pattern.csv", _normalized(best_pattern, cfg))
    io.write_assignment(out / "oracle_assignment.csv", res.best)
    spread = mask_spread(scenario, res.best, [seed + i for i in range(1, 11)]) if scenario.M else []
    summary = {"baseline_db": res.baseline_objective, "best_db": res.best_objective,
               "improvement_db": res.improvement, "evaluations": res.evaluations, "mode": res.mode,
               "mask_spread_db": [min(spread), max(spread)] if spread else []}
    _write_json(out / "oracle_summary.json", summary)
    return summary


def cmd_eval(cfg: ExperimentConfig, out: Path, seed: int, checkpoint: Path) -> dict:
    try:
        net, _ = load_checkpoint(checkpoint)
    except (ValueError, struct_error) as exc:
        raise CheckpointMismatch(str(exc)) from None
    scenario = cfg.scenario(seed)
    env = SuppressionEnv(scenario)
    if net.input_dim != env.state_dim or net.action_count != env.action_count:
        raise CheckpointMismatch(
            f"checkpoint expects state {net.input_dim} / actions {net.action_count}, "
            f"config gives state {env.state_dim} / actions {env.action_count}")
    state = env.reset()
    inference = 0.0
    reward = scenario.baseline_objective
    while not env.done:
        t0 = time.perf_counter()
        a = select_action(net, env.features(state), 0.0, None)
        inference += time.perf_counter() - t0
        state, reward, _ = env.step(a)
    assignment = env._assignment()
    io.write_pattern(out / "eval_pattern.csv", _normalized(env.last_pattern, cfg))
    io.write_assignment(out / "eval_assignment.csv", assignment)
    summary = {"objective_db": reward, "baseline_db": scenario.baseline_objective,
               "inference_seconds": inference, "actions": [int(a) for a in env.actions_taken]}
    _write_json(out / "eval_summary.json", summary)
    return summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ris-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("pattern", "synthesize profile(s) and write the far-field pattern"),
                        ("train", "train the DQN suppression agent"),
                        ("oracle", "brute-force (delta, xi) search"),
                        ("eval", "greedy rollout of a trained checkpoint")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config path or preset name")
        p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS threads (default: $RIS_LAB_THREADS or all cores)")
        if name == "train":
            p.add_argument("--episodes", type=int, default=None, help="override agent.episodes")
        if name == "eval":
            p.add_argument("--checkpoint", required=True, type=Path)
    return parser


def _thread_limit(n: int | None):
    if n is None and os.environ.get("RIS_LAB_THREADS"):
        n = int(os.environ["RIS_LAB_THREADS"])
    if n is None:
        from contextlib import nullcontext
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    seed = cfg.seed if args.seed is None else args.seed
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        with _thread_limit(args.threads):
            if args.command == "pattern":
                summary = cmd_pattern(cfg, args.out, seed)
            elif args.command == "train":
                summary = cmd_train(cfg, args.out, seed, args.episodes)
            elif args.command == "oracle":
                summary = cmd_oracle(cfg, args.out, seed)
            else:
                summary = cmd_eval(cfg, args.out, seed, args.checkpoint)
    except CheckpointMismatch as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except (ValueError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for k, v in summary.items():
        print(f"{k}: {v:.4f}" if isinstance(v, float) else f"{k}: {v}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
