"""End-to-end acceptance criteria; each test records one PASS/FAIL line.

Training-based criteria run on a 2 degree grid to keep the suite at desk scale.
"""

import dataclasses
import json
import statistics
import time

import numpy as np
import pytest

from conftest import record
from ris_lab.analysis import beam_regions, objective, unwanted_peak
from ris_lab.cli import main
from ris_lab.config import load_config, preset_text
from ris_lab.dqn import Mlp
from ris_lab.env import SuppressionEnv, run_training
from ris_lab.farfield import FarFieldPattern, pattern
from ris_lab.geometry import AngularGrid, Direction, angular_distance, distance_map
from ris_lab.io import read_pattern_db, write_pattern
from ris_lab.oracle import certify_engine, grid_search
from ris_lab.suppression import SuppressionAssignment
from ris_lab.synthesis import single_focus_profile, superpose

GRID2 = AngularGrid(2.0, 2.0)
SEEDS = (0, 1, 2)
MASK_SEED = 0
TARGET = Direction(45, 30)


def sec5(bits: int):
    cfg = load_config(f"sec5_{bits}bit")
    return dataclasses.replace(cfg, mask_seed=MASK_SEED, grid=GRID2)


def single_focus(bits: int):
    cfg = load_config("single_focus")
    return dataclasses.replace(cfg, array=cfg.array.with_bits(bits))


@pytest.fixture(scope="session")
def oracle_2bit():
    return grid_search(sec5(2).scenario())


@pytest.fixture(scope="session")
def dqn_runs():
    """Best greedy objective minus baseline, per bit depth and seed."""
    out = {}
    for bits in (1, 2, 3):
        cfg = sec5(bits)
        sc = cfg.scenario()
        runs = [run_training(sc, cfg.agent, seed=s) for s in SEEDS]
        out[bits] = {
            "baseline": sc.baseline_objective,
            "best": [r.best_greedy.objective for r in runs],
            "final": [r.final_greedy.objective for r in runs],
        }
    return out


def test_c01_engine_equivalence():
    t0 = time.perf_counter()
    rep = certify_engine([(1, 1), (4, 4), (8, 8)], trials=100, seed=0, tolerance=1e-9)
    dt = time.perf_counter() - t0
    worst = max(rep.max_rel_error.values())
    record(1, "engine equivalence", rep.passed and dt < 60,
           f"max rel err {worst:.2e} (1x1 {rep.max_rel_error[(1, 1)]:.1e}), {dt:.1f}s")


def test_c02_single_focus_pointing():
    cfg = single_focus(3)
    t0 = time.perf_counter()
    prof = single_focus_profile(cfg.array, cfg.incident, TARGET)
    p = pattern(cfg.array, prof, cfg.grid)
    dt = time.perf_counter() - t0
    off = angular_distance(p.peak_direction(), TARGET)
    cont = pattern(cfg.array, prof, cfg.grid, quantized=False)
    i, j = cfg.grid.index_of(TARGET)
    gain = cont.magnitude[i, j]
    peak_is_target = cont.magnitude.max() == gain
    ok = off <= 1.0 and abs(gain - cfg.array.size) <= 1e-9 * cfg.array.size and peak_is_target and dt < 10
    record(2, "single-focus pointing", ok,
           f"quantized peak {off:.2f} deg from target; continuous |E|={gain:.9f} (X*Y={cfg.array.size}); {dt:.2f}s")


def test_c03_one_bit_mirror_lobe():
    cfg = single_focus(1)
    p = pattern(cfg.array, single_focus_profile(cfg.array, cfg.incident, TARGET), cfg.grid)
    main_db = 20 * np.log10(p.magnitude.max())
    lobe_db = 20 * np.log10(unwanted_peak(p, cfg.beams()))
    gap = main_db - lobe_db
    record(3, "1-bit mirror lobe", abs(gap) <= 0.2, f"main - mirror = {gap:.3f} dB")


def test_c04_crossed_pair_lobe():
    cfg = load_config("fig3")
    _, unwanted = beam_regions(cfg.grid, cfg.beams())
    parts, ok = [], True
    for bits in (2, 3):
        arr = cfg.array.with_bits(bits)
        prof = superpose([single_focus_profile(arr, cfg.incident, t) for t in cfg.targets], cfg.superposition)
        p = pattern(arr, prof, cfg.grid)
        masked = np.where(unwanted, p.magnitude, -np.inf)
        i, j = np.unravel_index(np.argmax(masked), masked.shape)
        d = distance_map(cfg.grid, Direction(45, 90))[i, j]
        ok &= bool(d <= 10.0)
        parts.append(f"{bits}-bit strongest unwanted at ({cfg.grid.thetas[i]:g},{cfg.grid.phis[j]:g}), "
                     f"{d:.1f} deg from (45,90)")
    record(4, "crossed-pair lobe location", ok, "; ".join(parts))


def test_c05_baseline_gap():
    cfg = dataclasses.replace(load_config("sec5_2bit"))
    p = pattern(cfg.array, superpose([single_focus_profile(cfg.array, cfg.incident, t) for t in cfg.targets],
                                     cfg.superposition), cfg.grid)
    obj = objective(p, cfg.beams())
    record(5, "baseline gap (2-bit, 1 deg grid)", 4.0 <= obj <= 8.0, f"objective {obj:.2f} dB, bracket [4, 8]")


def test_c06_oracle_suppression(oracle_2bit):
    t0 = time.perf_counter()
    res = grid_search(sec5(2).scenario())
    dt = time.perf_counter() - t0
    assert res.best_objective == oracle_2bit.best_objective
    record(6, "oracle suppression (2-bit, 2 deg grid)", res.improvement >= 3.0 and dt < 600,
           f"baseline {res.baseline_objective:.2f} -> {res.best_objective:.2f} dB "
           f"(+{res.improvement:.2f}), {res.evaluations} evals, {dt:.0f}s")


def test_c07_dqn_reproduction(dqn_runs, oracle_2bit):
    two, three = dqn_runs[2], dqn_runs[3]
    med2 = statistics.median(two["best"]) - two["baseline"]
    med3 = statistics.median(three["best"]) - three["baseline"]
    gap = oracle_2bit.best_objective - statistics.median(two["best"])
    top = max(two["final"] + three["final"])
    checks = {
        "2-bit >= +3": med2 >= 3.0,
        "2-bit within 1 dB of oracle": gap <= 1.0,
        "3-bit >= +3.5": med3 >= 3.5,
        "a seed >= 9 dB": top >= 9.0,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"2-bit median +{med2:.2f} dB (best {['%.2f' % v for v in two['best']]}, oracle gap {gap:.2f}); "
              f"3-bit median +{med3:.2f} dB (baseline {three['baseline']:.2f}); max final {top:.2f} dB"
              + (f"; failing: {', '.join(failed)}" if failed else ""))
    record(7, "DQN reproduction", not failed, detail)


def test_c08_one_bit_negative(dqn_runs):
    one, two = dqn_runs[1], dqn_runs[2]
    gains = [b - one["baseline"] for b in one["best"]]
    med2 = statistics.median(two["best"]) - two["baseline"]
    ok = all(g < 1.0 for g in gains) and statistics.median(gains) <= med2
    record(8, "1-bit negative result", ok,
           f"baseline {one['baseline']:.2f} dB, gains {['%.2f' % g for g in gains]} vs 2-bit median +{med2:.2f}")


def test_c09_gradient_check():
    from test_dqn import _fd_check
    t0 = time.perf_counter()
    worst = max(_fd_check(seed) for seed in range(20))
    dt = time.perf_counter() - t0
    record(9, "gradient correctness", worst <= 1e-4 and dt < 60, f"max rel err {worst:.2e} over 20 nets, {dt:.1f}s")


def test_c10_determinism(tmp_path):
    raw = json.loads(preset_text("sec5_2bit"))
    raw["grid"] = {"theta_step": 2, "phi_step": 2}
    raw["agent"]["episodes"] = 40
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(raw))
    logs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["train", "--config", str(cfg_path), "--out", str(out), "--seed", "7"]) == 0
        logs.append((out / "training_log.csv").read_bytes())
    record(10, "training determinism", logs[0] == logs[1], f"{len(logs[0])} bytes, identical={logs[0] == logs[1]}")


def test_c11_suppression_identity(tmp_path):
    sc = sec5(2).scenario()
    identity = sc.profile(SuppressionAssignment.identity(sc.M, 5))
    bitwise = np.array_equal(identity.quantized_rad, sc.baseline_profile.quantized_rad)
    env = SuppressionEnv(sc)
    worst = 0.0
    rng = np.random.default_rng(0)
    for k in range(5):
        env.reset(mask_seed=k)
        r = 0.0
        while not env.done:
            _, r, _ = env.step(int(rng.integers(sc.actions.action_count)))
        write_pattern(tmp_path / f"p{k}.csv", env.last_pattern)
        _, _, db = read_pattern_db(tmp_path / f"p{k}.csv")
        worst = max(worst, abs(objective(FarFieldPattern(sc.grid, 10 ** (db / 20)), sc.beams) - r))
    record(11, "suppression identity", bitwise and worst <= 1e-12,
           f"identity bitwise={bitwise}; max |reward - recomputed| = {worst:.1e}")
