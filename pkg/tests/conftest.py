import math

import numpy as np
import pytest

from ris_lab.analysis import BeamSet
from ris_lab.geometry import AngularGrid, ArrayConfig, Direction, SPEED_OF_LIGHT

BROADSIDE = Direction(0.0, 0.0)
SEC5_TARGETS = (Direction(45, 30), Direction(45, 60))
CROSSED_TARGETS = (Direction(30, 135), Direction(30, 45))


def sec5_config(bits: int) -> ArrayConfig:
    return ArrayConfig(50, 50, 0.017, 3.5e9, bits)


def half_wave_config(X: int, Y: int, bits: int = 2) -> ArrayConfig:
    f = 3.5e9
    return ArrayConfig(X, Y, SPEED_OF_LIGHT / f / 2, f, bits)


def beams_without_specular(targets) -> BeamSet:
    return BeamSet(tuple(targets), 10.0, (BROADSIDE,))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def grid2():
    return AngularGrid(2.0, 2.0)


@pytest.fixture(scope="session")
def grid1():
    return AngularGrid(1.0, 1.0)


def db(x):
    return 20 * math.log10(x)


# -- acceptance report --------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    """Store a criterion outcome for the end-of-run summary, then assert it."""
    ACCEPTANCE[number] = (title, bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}")
    assert ok, f"criterion {number} ({title}) failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}")
