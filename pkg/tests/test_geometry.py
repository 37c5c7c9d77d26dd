import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ris_lab.geometry import AngularGrid, ArrayConfig, Direction, angular_distance, element_offsets

directions = st.builds(Direction, st.integers(0, 90).map(float), st.integers(0, 359).map(float))


def test_angular_distance_examples():
    assert angular_distance(Direction(45, 30), Direction(45, 30)) == 0
    assert angular_distance(Direction(45, 355), Direction(45, 5)) == pytest.approx(10)
    # hand arithmetic: sqrt(15^2 + 45^2)
    assert angular_distance(Direction(30, 45), Direction(45, 90)) == pytest.approx(47.4341649025, abs=1e-9)


@given(directions, directions)
def test_angular_distance_symmetric(a, b):
    assert angular_distance(a, b) == angular_distance(b, a)
    assert angular_distance(a, a) == 0


def test_direction_wraps_phi_and_rejects_theta():
    assert Direction(10, 370).phi_deg == 10
    assert Direction(10, -90).phi_deg == 270
    with pytest.raises(ValueError):
        Direction(91, 0)


@pytest.mark.parametrize("x,y,expected", [(0, 0, (0, 0)), (1, 2, (0.017, 0.034)), (49, 49, (0.833, 0.833))])
def test_element_offsets(x, y, expected):
    cfg = ArrayConfig(50, 50, 0.017, 3.5e9, 2)
    assert element_offsets(cfg, x, y) == pytest.approx(expected)


def test_element_offsets_out_of_range():
    cfg = ArrayConfig(4, 4, 0.017, 3.5e9, 2)
    with pytest.raises(IndexError):
        element_offsets(cfg, 4, 0)


def test_sec5_pitch_is_about_a_fifth_wavelength():
    cfg = ArrayConfig(50, 50, 0.017, 3.5e9, 2)
    assert 0.19 <= cfg.pitch_m / cfg.wavelength <= 0.21
    assert cfg.wavenumber == pytest.approx(2 * math.pi / cfg.wavelength)


@pytest.mark.parametrize("kwargs", [
    dict(elements_x=0, elements_y=1, pitch_m=0.01, frequency_hz=1e9),
    dict(elements_x=1, elements_y=1, pitch_m=0.0, frequency_hz=1e9),
    dict(elements_x=1, elements_y=1, pitch_m=0.01, frequency_hz=-1),
    dict(elements_x=1, elements_y=1, pitch_m=0.01, frequency_hz=1e9, phase_bits=9),
])
def test_array_config_invariants(kwargs):
    with pytest.raises(ValueError):
        ArrayConfig(**kwargs)


def test_grid_points():
    g = AngularGrid(30, 90)
    assert list(g.thetas) == [0, 30, 60, 90]
    assert list(g.phis) == [0, 90, 180, 270]
    assert g.shape == (4, 4)
    with pytest.raises(ValueError):
        AngularGrid(7, 1)


def test_broadside_has_no_azimuth():
    assert angular_distance(Direction(0, 0), Direction(0, 90)) == 0
    assert angular_distance(Direction(0, 200), Direction(12, 40)) == pytest.approx(12)
