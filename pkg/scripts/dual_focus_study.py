"""Train the suppression agent on the dual-focus presets for several bit depths and seeds.

    python scripts/dual_focus_study.py --bits 1 2 3 --seeds 0 1 2 --grid 2 --out runs/study

Prints baseline / best greedy / improvement per run and the per-bit median, and
writes a summary CSV.
"""

import argparse
import dataclasses
import statistics
import time
from pathlib import Path

from ris_lab import io
from ris_lab.config import load_config
from ris_lab.env import run_training
from ris_lab.geometry import AngularGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--bits", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--grid", type=float, default=2.0, help="angular step in degrees")
    ap.add_argument("--episodes", type=int, default=None)
    ap.add_argument("--mask-seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("runs/dual_focus"))
    args = ap.parse_args()

    rows = []
    for bits in args.bits:
        cfg = load_config(f"sec5_{bits}bit")
        cfg = dataclasses.replace(cfg, grid=AngularGrid(args.grid, args.grid), mask_seed=args.mask_seed)
        scenario = cfg.scenario()
        print(f"{bits}-bit: baseline {scenario.baseline_objective:.2f} dB, {scenario.M} sidelobes "
              f"at {[(d.theta_deg, d.phi_deg) for d in scenario.sidelobes.directions]}")
        gains = []
        for seed in args.seeds:
            t0 = time.perf_counter()
            res = run_training(scenario, cfg.agent, args.episodes, seed)
            gain = res.best_greedy.objective - res.baseline
            gains.append(gain)
            print(f"  seed {seed}: best greedy {res.best_greedy.objective:.2f} dB (+{gain:.2f}), "
                  f"final {res.final_greedy.objective:.2f} dB, {time.perf_counter() - t0:.0f}s")
            io.write_training_log(args.out / f"log_{bits}bit_seed{seed}.csv", res.log)
            rows.append((bits, seed, res.baseline, res.best_greedy.objective, res.final_greedy.objective, gain))
        print(f"  median improvement: +{statistics.median(gains):.2f} dB")
    io.write_rows(args.out / "summary.csv",
                  ["bits", "seed", "baseline_db", "best_greedy_db", "final_greedy_db", "improvement_db"], rows)


if __name__ == "__main__":
    main()
