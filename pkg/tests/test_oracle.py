import numpy as np
import pytest

from conftest import CROSSED_TARGETS, beams_without_specular, sec5_config
from ris_lab.analysis import Sidelobe, SidelobeSet
from ris_lab.env import Scenario
from ris_lab.geometry import AngularGrid, Direction
from ris_lab.oracle import certify_engine, grid_search, mask_spread, relative_error

INC = Direction(0, 0)


@pytest.fixture(scope="module")
def one_lobe():
    return Scenario(sec5_config(2), INC, beams_without_specular(CROSSED_TARGETS), AngularGrid(2, 2),
                    sidelobes=SidelobeSet((Sidelobe(Direction(44, 90), 0.0),), 10.0))


def test_m1_exhaustive_count(one_lobe):
    res = grid_search(one_lobe)
    assert res.mode == "exhaustive"
    assert res.evaluations == 25
    assert res.best_objective >= res.baseline_objective
    assert res.best_objective > res.baseline_objective


def test_baseline_optimal_returns_identity(one_lobe):
    res = grid_search(one_lobe, values=(0.0,))
    assert res.best.entries == ((0.0, 0.0),)
    assert res.best_objective == res.baseline_objective


def test_coordinate_descent_never_worse(one_lobe):
    res = grid_search(one_lobe, mode="coordinate")
    assert res.best_objective >= res.baseline_objective
    ex = grid_search(one_lobe)
    # with a single coordinate pair, one sweep is the exhaustive search
    assert res.best_objective == ex.best_objective


def test_grid_search_deterministic_and_executor(one_lobe):
    from concurrent.futures import ThreadPoolExecutor
    a = grid_search(one_lobe, seed=4)
    with ThreadPoolExecutor(2) as ex:
        b = grid_search(one_lobe, seed=4, executor=ex)
    assert a.best == b.best and a.best_objective == b.best_objective


def test_mask_spread_length(one_lobe):
    res = grid_search(one_lobe)
    spread = mask_spread(one_lobe, res.best, range(1, 11))
    assert len(spread) == 10 and all(np.isfinite(spread))


def test_relative_error_floor():
    assert relative_error(np.array([0.0, 5.0]), np.array([1e-3, 5.0])) == pytest.approx(1e-3)


def test_certify_single_element():
    rep = certify_engine([(1, 1)], trials=20)
    assert rep.max_rel_error[(1, 1)] == 0.0
    assert rep.passed


def test_certify_small_array():
    rep = certify_engine([(3, 2)], trials=5, bits=3)
    assert rep.passed
