import math

import numpy as np
import pytest

from adradar.mac import (
    BeamGeometry,
    MacConfig,
    Scenario,
    Vehicle,
    build_sectors,
    legacy_bhi_duration,
    overhead_fraction,
    radar_bhi_duration,
    run_comparison,
    simulate_misalignment,
)
from adradar.planner import plan_sweep


def test_legacy_bhi_by_hand():
    cfg = MacConfig()
    expect = 32 * 0.26671875e-3 + 9e-6 + 4 * (32 * 16e-6 + 16e-6 + 16e-6)
    assert legacy_bhi_duration(cfg) == pytest.approx(expect)
    assert legacy_bhi_duration(cfg) == pytest.approx(10.72e-3)
    assert overhead_fraction(10.72e-3, 30e-3) == pytest.approx(35.7333, abs=1e-3)


def test_radar_bhi():
    cfg, plan = MacConfig(), plan_sweep(dv=0.45)
    assert radar_bhi_duration(cfg, plan) == pytest.approx(plan.t_radar)
    six = radar_bhi_duration(cfg, plan, 6)
    assert six == pytest.approx(plan.t_radar + 9e-6 + 6 * (0.26671875e-3 + 48e-6))
    with pytest.raises(ValueError):
        radar_bhi_duration(cfg, plan, -1)


def test_sector_tiling():
    s = build_sectors(BeamGeometry(theta_az_deg=3.0, overlap_ratio=0.7))
    assert s.lower_deg[0] == -60.0 and s.upper_deg[-1] == 60.0
    assert np.allclose(np.diff(s.lower_deg), 0.9)
    assert len(s) == math.ceil(117 / 0.9 - 1e-9) + 1
    # every angle is covered, usually by several overlapping beams
    for a in np.linspace(-60, 60, 241):
        assert s.covering(a)
    assert s.nearest(-60.0) == 0 and s.nearest(60.0) == len(s) - 1
    with pytest.raises(ValueError):
        BeamGeometry(overlap_ratio=1.0)


def test_perfect_estimates_never_misalign():
    sc = Scenario.default()
    cdf = simulate_misalignment(sc, 64, seed=1, doppler_resolution=0.0, range_res=0.0)
    assert cdf.at_coverage_end == 0.0


def test_gross_speed_error_misaligns():
    sc = Scenario.default(geometry=BeamGeometry(overlap_ratio=0.0))
    cdf = simulate_misalignment(sc, 64, seed=1, doppler_resolution=10.0)
    assert cdf.at_coverage_end > 0.5
    assert np.all(np.diff(cdf.probability) >= 0)
    assert cdf.positions_m[-1] == pytest.approx(sc.geometry.road_length)


def test_determinism_and_jobs_invariance():
    sc = Scenario.default(plan=plan_sweep(dv=1.5))
    a = simulate_misalignment(sc, 100, seed=7)
    b = simulate_misalignment(sc, 100, seed=7, n_jobs=3)
    assert np.array_equal(a.probability, b.probability)
    assert np.array_equal(a.first_misaligned_m, b.first_misaligned_m)
    c = simulate_misalignment(sc, 100, seed=8)
    assert not np.array_equal(a.first_misaligned_m, c.first_misaligned_m)


def test_single_vehicle_oracle():
    # Same draws as the simulator, then an independent per-sample angle check.
    geo = BeamGeometry(overlap_ratio=0.3)
    plan = plan_sweep(dv=1.5)
    half = geo.road_length / 2
    veh = Vehicle(-half + 5.0, 25.0)
    sc = Scenario(geo, plan, [veh])
    cdf = simulate_misalignment(sc, 40, seed=3, dt=2e-3)
    s = build_sectors(geo)
    dR = 3e8 / 1.76e9 / 2
    for k in range(40):
        u = np.random.default_rng([3, k]).uniform(-0.5, 0.5, size=(1, 2))[0]
        y_hat0, v_hat = veh.y_m + u[0] * dR, veh.v_mps + u[1] * plan.timing.doppler_resolution
        first = np.inf
        for n in range(int(math.ceil((half - veh.y_m) / veh.v_mps / 2e-3)) + 1):
            t = n * 2e-3
            y = veh.y_m + veh.v_mps * t
            if y > half:
                break
            i = int(s.nearest(math.degrees(math.atan((y_hat0 + v_hat * t) / geo.d))))
            ang = math.degrees(math.atan(y / geo.d))
            if not s.lower_deg[i] - 1e-9 <= ang <= s.upper_deg[i] + 1e-9:
                first = y + half
                break
        got = cdf.first_misaligned_m[k]
        if np.isinf(first):
            assert np.isinf(got)
        else:
            assert got == pytest.approx(first, abs=veh.v_mps * 2e-3 + 1e-9)


def test_run_comparison():
    sc = Scenario.default()
    res = run_comparison(sc, n_trials=50, seed=0)
    assert res.overhead_legacy_pct == pytest.approx(35.73, abs=0.01)
    assert 78 <= res.reduction_pct <= 88
    assert run_comparison(sc, legacy_only=True).bhi_time_radar is None


def test_scenario_validation():
    with pytest.raises(ValueError):
        Vehicle(0.0, 0.0)
    with pytest.raises(ValueError):
        Scenario(vehicles=[Vehicle(0.0, 40.0)])
    with pytest.raises(ValueError):
        Scenario(vehicles=[Vehicle(1000.0, 20.0)])
    with pytest.raises(ValueError):
        simulate_misalignment(Scenario(), 10)
    with pytest.raises(ValueError):
        simulate_misalignment(Scenario.default(), 0)
