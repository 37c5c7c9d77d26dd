import math

import numpy as np
import pytest

from conftest import half_wave_config, sec5_config
from ris_lab.farfield import DB_FLOOR, FarFieldPattern, normalize_db, opd, pattern, pattern_reference, to_db
from ris_lab.geometry import AngularGrid, ArrayConfig, Direction
from ris_lab.oracle import relative_error
from ris_lab.synthesis import ReflectionProfile, single_focus_profile

COARSE = AngularGrid(10, 15)


def test_opd_examples():
    cfg = ArrayConfig(2, 2, 0.017, 3.5e9)
    assert opd(cfg, 1, 1, Direction(0, 77)) == 0
    assert opd(cfg, 1, 0, Direction(90, 0)) == pytest.approx(0.017)
    s = math.sqrt(0.5)
    assert opd(cfg, 1, 1, Direction(45, 45)) == pytest.approx(0.017 * (s + s) * s)
    assert opd(cfg, 1, 1, Direction(45, 45)) == pytest.approx(0.017)


@pytest.mark.parametrize("engine", [pattern, pattern_reference])
def test_single_element_is_isotropic(engine, rng):
    cfg = ArrayConfig(1, 1, 0.017, 3.5e9, 3)
    prof = ReflectionProfile(rng.uniform(0, 6, (1, 1)), 3)
    assert np.allclose(engine(cfg, prof, COARSE).magnitude, 1.0, atol=1e-15)


@pytest.mark.parametrize("engine", [pattern, pattern_reference])
def test_two_element_closed_form(engine):
    cfg = half_wave_config(2, 1)
    grid = AngularGrid(5, 90)
    p = engine(cfg, ReflectionProfile(np.zeros((2, 1)), 2), grid)
    expected = 2 * np.abs(np.cos(np.pi / 2 * np.sin(np.radians(grid.thetas))))
    assert np.allclose(p.magnitude[:, 0], expected, atol=1e-12)
    assert p.magnitude[-1, 0] == pytest.approx(0, abs=1e-12)


def test_matches_reference_8x8_random(rng):
    cfg = ArrayConfig(8, 8, 0.017, 3.5e9, 2)
    for _ in range(5):
        prof = ReflectionProfile(rng.uniform(0, 2 * np.pi, (8, 8)), 2)
        fast = pattern(cfg, prof, COARSE).magnitude
        ref = pattern_reference(cfg, prof, COARSE).magnitude
        assert relative_error(fast, ref) <= 1e-9


def test_magnitude_bounds(rng):
    cfg = ArrayConfig(6, 5, 0.02, 3.5e9, 3)
    prof = ReflectionProfile(rng.uniform(0, 2 * np.pi, (6, 5)), 3)
    m = pattern(cfg, prof, AngularGrid(3, 3)).magnitude
    assert np.all(m >= 0) and np.all(m <= cfg.size + 1e-9)


def test_dimension_mismatch():
    cfg = ArrayConfig(3, 3, 0.017, 3.5e9)
    with pytest.raises(ValueError):
        pattern(cfg, ReflectionProfile(np.zeros((3, 2)), 2), COARSE)
    with pytest.raises(ValueError):
        pattern_reference(cfg, ReflectionProfile(np.zeros((2, 3)), 2), COARSE)


def test_normalize_db():
    grid = AngularGrid(45, 180)
    mag = np.array([[1.0, 2.0], [4.0, 0.0], [0.5, 3.0]])
    p = FarFieldPattern(grid, mag)
    assert normalize_db(p, 4.0).db.max() == 0.0
    assert normalize_db(p, 8.0).db.max() == pytest.approx(-6.0206, abs=1e-4)
    assert normalize_db(p, 4.0).db[1, 1] == DB_FLOOR
    with pytest.raises(ValueError):
        normalize_db(p, 0.0)
    assert to_db(0.0) == DB_FLOOR


def test_rotating_target_by_90_rotates_pattern():
    cfg = ArrayConfig(12, 12, 0.017, 3.5e9, 3)
    grid = AngularGrid(3, 3)
    inc = Direction(0, 0)
    a = pattern(cfg, single_focus_profile(cfg, inc, Direction(40, 20)), grid, quantized=False)
    b = pattern(cfg, single_focus_profile(cfg, inc, Direction(40, 110)), grid, quantized=False)
    shift = int(90 / grid.phi_step_deg)
    assert np.max(np.abs(np.roll(a.magnitude, shift, axis=1) - b.magnitude)) <= 1e-6 * cfg.size


def test_grid_refinement_keeps_peak():
    cfg = sec5_config(3)
    prof = single_focus_profile(cfg, Direction(0, 0), Direction(45, 30))
    coarse = pattern(cfg, prof, AngularGrid(1, 1)).peak
    fine = pattern(cfg, prof, AngularGrid(0.5, 0.5)).peak
    assert fine >= coarse - 1e-9
    assert 20 * math.log10(fine / coarse) <= 0.5
