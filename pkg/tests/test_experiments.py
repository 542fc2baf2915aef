import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alelab.ade import make_path
from alelab.experiments import (DegeneratePathError, FitError, atomic_write, bubbling_profile, check_grid, csv_text,
                                default_grid, fit_exponent, fit_power, json_text, lp_scan, reparameterize, svg_loglog,
                                sweep_F)
from alelab.glue import ScheduleError, validity_bound
from alelab.integrate import zero_function

A1 = make_path("A", 1, {1: [(1, 0), (-1, 0)]}, d=2)
A2_WALL = make_path("A", 2, {1: [1, 1, -2]})


def test_fit_recovers_power_law():
    x = np.geomspace(1e-4, 1e-1, 8)
    fit = fit_power(x, 3.0 * x ** 0.5)
    assert fit.gamma == pytest.approx(0.5, abs=1e-12)
    assert fit.C == pytest.approx(3.0, rel=1e-10)
    assert fit.ok and fit.residual <= 1e-12


def test_fit_drops_points_below_noise():
    x = np.geomspace(1e-4, 1e-1, 8)
    err = np.where(x < 1e-3, 1.0, 0.0)
    fit = fit_power(x, 2.0 * x ** 2, err)
    assert len(fit.excluded) == 3
    assert fit.gamma == pytest.approx(2.0, abs=1e-12)


def test_fit_needs_four_points():
    with pytest.raises(FitError):
        fit_exponent(t=[1e-3, 5e-4, 2.5e-4], F=[1.0, 1.1, 1.2], limit=0.0)


@given(st.floats(-3.0, 5.0), st.integers(1, 4), st.floats(0.1, 10.0))
def test_reparameterization_matches_direct_fit(gamma, d, C):
    t = np.geomspace(1e-6, 1e-2, 6)
    s = t ** (1.0 / d)
    y = C * s ** gamma
    via_s = reparameterize(fit_power(s, y), d)
    direct = fit_power(t, y)
    assert via_s.gamma == pytest.approx(direct.gamma, abs=1e-8)
    assert via_s.C == pytest.approx(direct.C, rel=1e-6)


def test_reparameterize_identity():
    fit = fit_power(np.geomspace(1e-3, 1e-1, 5), np.geomspace(1e-3, 1e-1, 5) ** 1.5)
    same = reparameterize(fit, 1)
    assert same.gamma == fit.gamma and same.C == fit.C and same.used == fit.used


def test_default_grid():
    g = default_grid("cscK", 1, n=6)
    assert g[0] == pytest.approx(0.9 * validity_bound("cscK", 1, 0.51))
    assert np.allclose(g[1:] / g[:-1], 0.5)
    check_grid(g, "cscK", 1, 1, 0.51, -1.9)


@pytest.mark.parametrize("grid", [[1e-3], [1e-4, 1e-3], [1e-3, 5e-4, 1e-4], [0.5, 0.25, 0.125]])
def test_check_grid_rejects(grid):
    with pytest.raises(ScheduleError):
        check_grid(grid, "cscK", 1, 1, 0.51, -1.9)


def test_zero_test_function_reports_no_signal():
    res = sweep_F(A1, "cscK", zero_function(), grid=default_grid("cscK", 1, n=5))
    assert res.fit is None
    assert res.status.startswith("no signal")
    assert np.all(res.F == 0.0)


def test_sweep_deterministic():
    grid = default_grid("cscK", 1, n=2)
    one = sweep_F(A1, grid=grid, fit=False)
    two = sweep_F(A1, grid=grid, fit=False)
    assert np.array_equal(one.F, two.F)
    assert one.limit == two.limit


def test_degenerate_path_refused():
    with pytest.raises(DegeneratePathError):
        sweep_F(A2_WALL, grid=default_grid("cscK", 1, n=4))
    with pytest.raises(DegeneratePathError):
        bubbling_profile(A2_WALL)


@pytest.mark.parametrize("p", [2.0, 1.0, 1.5])
def test_lp_exponent_range(p):
    with pytest.raises(ValueError):
        lp_scan(A1, p_list=(p,))


def test_bubbling_flags_wrong_euler_number():
    grid = default_grid("cscK", 1, n=5)
    good = bubbling_profile(A1, grid)
    bad = bubbling_profile(A1, grid, e_orb=1.0)
    assert good.prediction == pytest.approx(1.5)
    assert not good.flagged
    assert bad.flagged


def test_artifact_writers(tmp_path):
    path = tmp_path / "sub" / "rows.csv"
    atomic_write(str(path), csv_text([{"t": 0.1, "F": 1.25}]))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema:")
    assert lines[1:] == ["t,F", "0.1,1.25"]
    data = json.loads(json_text({"x": np.arange(3), "y": np.float64(2.0)}))
    assert data["x"] == [0, 1, 2] and data["y"] == 2.0 and "schema" in data
    svg = svg_loglog([("s", [1e-3, 1e-2], [1e-6, 1e-4], lambda x: x ** 2)])
    assert svg.startswith("<svg") and svg.count("<circle") == 2
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["rows.csv"]
