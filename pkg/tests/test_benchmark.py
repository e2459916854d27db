import numpy as np
import pytest

from phasecert.benchmark import (CALIBRATED_A, CalibrationResult,
                                 calibrate_a, default_b_grid,
                                 instability_interval, max_pole_real,
                                 run_benchmark, verify_a)
from phasecert.certify import default_grid
from phasecert.errors import CalibrationFailure


def test_default_coupling_is_stable_everywhere():
    # the conventional value leaves the loop Hurwitz for every b
    assert instability_interval(10.0) is None


def test_instability_interval_matches_routh():
    # Routh condition for s^3 + c2 s^2 + c1 s + c0: unstable iff c2*c1 < c0,
    # i.e. 2.75 b^2 + (6.5 - 0.125 a^2) b + 3.75 < 0
    a = 12.0
    roots = np.sort(np.roots([2.75, 6.5 - 0.125 * a * a, 3.75]))
    interval = instability_interval(a)
    assert interval is not None
    np.testing.assert_allclose(interval, roots, rtol=1e-3)


def test_max_pole_real_sign():
    assert max_pole_real(12.0, 1.0) > 0
    assert max_pole_real(12.0, 50.0) < 0


def test_shipped_calibration_verifies():
    res = verify_a(CALIBRATED_A)
    assert isinstance(res, CalibrationResult)
    assert max(res.rel_errors) <= 0.15


def test_calibration_lands_near_shipped_value():
    cal = calibrate_a()
    assert cal.a == pytest.approx(CALIBRATED_A, abs=5e-3)
    assert max(cal.rel_errors) <= 0.15


def test_calibration_failure_on_impossible_target():
    with pytest.raises(CalibrationFailure):
        calibrate_a(target=(0.45, 290.0), a_range=(9.0, 12.0))


def test_run_benchmark_smoke():
    # 24 points are enough for the grid to sample the passivity gap
    study = run_benchmark(b_grid=[1.0, 30.0], grid=default_grid(points=24))
    assert study.calibrated
    assert study.a == pytest.approx(CALIBRATED_A)
    rows = {r.b: r for r in study.rows}
    assert not rows[1.0].oracle_stable
    assert rows[30.0].oracle_stable
    assert rows[30.0].certified[("gain", "phase")]
    assert not rows[30.0].certified[("gain", "passivity")]
    man = study.manifest()
    assert man["family"] == "rotating-body"
    assert man["oracle_instability_interval"] is not None
    assert len(man["rows"]) == 2


def test_default_b_grid_span():
    grid = default_b_grid()
    assert len(grid) == 60
    assert grid[0] == pytest.approx(0.05)
    assert grid[-1] == pytest.approx(100.0)
