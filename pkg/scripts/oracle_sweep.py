"""Coarse (delta, xi) oracle on the dual-focus presets, with mask-seed spread.

    python scripts/oracle_sweep.py --bits 2 3 --grid 2
"""

import argparse
import dataclasses
import time

from ris_lab.config import load_config
from ris_lab.geometry import AngularGrid
from ris_lab.oracle import grid_search, mask_spread


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--bits", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--grid", type=float, default=2.0)
    ap.add_argument("--mask-seed", type=int, default=0)
    args = ap.parse_args()
    for bits in args.bits:
        cfg = dataclasses.replace(load_config(f"sec5_{bits}bit"), grid=AngularGrid(args.grid, args.grid),
                                  mask_seed=args.mask_seed)
        sc = cfg.scenario()
        t0 = time.perf_counter()
        res = grid_search(sc, cfg.oracle_values)
        spread = mask_spread(sc, res.best, range(1, 11))
        print(f"{bits}-bit ({res.mode}, M={sc.M}): {res.baseline_objective:.2f} -> {res.best_objective:.2f} dB "
              f"(+{res.improvement:.2f}) with {res.best.entries}; {res.evaluations} evals, "
              f"{time.perf_counter() - t0:.0f}s; other masks {min(spread):.2f}..{max(spread):.2f} dB")


if __name__ == "__main__":
    main()
