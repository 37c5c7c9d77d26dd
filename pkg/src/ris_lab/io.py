"""CSV exports. Floats are written with 17 significant digits so they round-trip exactly."""

from __future__ import annotations

import csv
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ris_lab.analysis import SidelobeSet
from ris_lab.farfield import DB_FLOOR, FarFieldPattern
from ris_lab.suppression import SuppressionAssignment
from ris_lab.synthesis import ReflectionProfile


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@contextmanager
def atomic_open(path, mode: str = "w"):
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        kwargs = {"newline": ""} if "b" not in mode else {}
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        r = list(csv.reader(fh))
    return r[0], r[1:]


def write_profile(path, profile: ReflectionProfile) -> None:
    X, Y = profile.shape
    write_rows(path, ["x", "y", "phase_rad", "quantized_rad"],
               ((x, y, float(profile.phases_rad[x, y]), float(profile.quantized_rad[x, y]))
                for x in range(X) for y in range(Y)))


def read_profile(path, bits: int) -> ReflectionProfile:
    _, rows = read_rows(path)
    X = max(int(r[0]) for r in rows) + 1
    Y = max(int(r[1]) for r in rows) + 1
    ph = np.zeros((X, Y))
    q = np.zeros((X, Y))
    for r in rows:
        ph[int(r[0]), int(r[1])] = float(r[2])
        q[int(r[0]), int(r[1])] = float(r[3])
    return ReflectionProfile(ph, bits, q)


def write_pattern(path, p: FarFieldPattern) -> None:
    db = p.db
    th, ph = p.grid.thetas, p.grid.phis
    write_rows(path, ["theta_deg", "phi_deg", "intensity_db"],
               ((float(th[i]), float(ph[j]), float(max(db[i, j], DB_FLOOR)))
                for i in range(len(th)) for j in range(len(ph))))


def read_pattern_db(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(thetas, phis, dB matrix) from a pattern CSV."""
    _, rows = read_rows(path)
    arr = np.array([[float(v) for v in r] for r in rows])
    thetas = np.unique(arr[:, 0])
    phis = np.unique(arr[:, 1])
    return thetas, phis, arr[:, 2].reshape(len(thetas), len(phis))


def write_sidelobes(path, lobes: SidelobeSet) -> None:
    write_rows(path, ["m", "theta_deg", "phi_deg", "intensity_db"],
               ((m + 1, float(l.direction.theta_deg), float(l.direction.phi_deg), float(l.intensity_db))
                for m, l in enumerate(lobes)))


def write_assignment(path, a: SuppressionAssignment) -> None:
    write_rows(path, ["m", "delta", "xi", "seed"],
               ((m + 1, d, x, a.mask_seed) for m, (d, x) in enumerate(a.entries)))


def read_assignment(path) -> SuppressionAssignment:
    _, rows = read_rows(path)
    seed = int(rows[0][3]) if rows else 0
    return SuppressionAssignment(tuple((float(r[1]), float(r[2])) for r in rows), seed)


def write_training_log(path, log) -> None:
    write_rows(path, ["episode", "epsilon", "reward_db", "mean_loss"],
               ((e, float(eps), float(r), float(l))
                for e, eps, r, l in zip(log.episode, log.epsilon, log.reward, log.mean_loss)))


def write_oracle_report(path, history) -> None:
    """One row per evaluated assignment: ``assignment_id, delta_1, xi_1, ..., objective_db``."""
    M = len(history[0][0]) if history else 0
    header = ["assignment_id"] + [f"{n}_{m + 1}" for m in range(M) for n in ("delta", "xi")] + ["objective_db"]
    write_rows(path, header,
               ([i] + [v for pair in a.entries for v in pair] + [float(obj)]
                for i, (a, obj) in enumerate(history)))
