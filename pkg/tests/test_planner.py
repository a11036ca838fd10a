import math

import pytest
from hypothesis import given, settings, strategies as st

from adradar.golay import FrameKind
from adradar.planner import (
    RadarTiming,
    SectorGeometry,
    SweepPlan,
    cpi_for_resolution,
    doppler_resolution,
    duty_ratio,
    duty_ratio_closed_form,
    max_unambiguous_velocity,
    min_pri,
    packets_for_resolution,
    plan_sweep,
    range_resolution,
    scan_time,
    sector_length,
    sweep_interval,
    validate_plan,
)


def test_timing_constants():
    assert min_pri(FrameKind.CPHY) == pytest.approx(7552 / 1.76e9)
    assert min_pri("SCPHY") == pytest.approx(3328 / 1.76e9)
    assert range_resolution() == pytest.approx(3e8 / 1.76e9 / 2)


def test_resolutions():
    assert max_unambiguous_velocity(0.166e-3) == pytest.approx(0.005 / 0.166e-3)
    assert doppler_resolution(64, 1e-4) == pytest.approx(0.005 / (2 * 64 * 1e-4))
    assert cpi_for_resolution(0.45) == pytest.approx(0.005 / 0.9)
    t = min_pri("CPHY")
    P = packets_for_resolution(0.45, t)
    assert doppler_resolution(P, t) <= 0.45 < doppler_resolution(P - 1, t)
    with pytest.raises(ValueError):
        doppler_resolution(0, 1e-6)
    with pytest.raises(ValueError):
        cpi_for_resolution(0)


def test_for_resolution_exact_cpi():
    t = RadarTiming.for_resolution(0.45)
    assert t.doppler_resolution == pytest.approx(0.45, rel=1e-12)
    assert t.T_pr >= min_pri("CPHY")
    assert t.T_pr < min_pri("CPHY") * (t.P + 1) / t.P
    plain = RadarTiming.for_resolution(0.45, stretch_pri=False)
    assert plain.T_pr == min_pri("CPHY") and plain.doppler_resolution <= 0.45
    with pytest.raises(ValueError):
        RadarTiming(T_pr=1e-6)
    with pytest.raises(ValueError):
        RadarTiming(P=0)


def test_scan_time_floor():
    assert scan_time(5.0, 1e-3) == pytest.approx(10e-3)
    assert scan_time(5.2, 1e-3) == pytest.approx(10e-3)
    assert scan_time(0.4, 1e-3) == 0.0
    # floating point near an integer multiple
    assert scan_time(1.5, 1.0, 0.1) == pytest.approx(15.0)


def test_sector_length_oracle():
    # r = d (tan 60 - tan 55) at theta_start = 0
    assert sector_length(100, 120, 0, 5) == pytest.approx(100 * (math.tan(math.radians(60)) - math.tan(math.radians(55))))
    with pytest.raises(ValueError):
        sector_length(100, 120, 118, 5)
    with pytest.raises(ValueError):
        sector_length(-1, 120, 0, 5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 59.0), st.floats(0.6, 20.0), st.floats(0.1, 3.0))
def test_closed_form_matches_composition(th, phi, dv):
    # theta_radar = 0.5 deg and phi a multiple of it: floor(phi/0.5) = 2 phi
    phi = round(phi * 2) / 2
    assert duty_ratio(phi, th, dv) == pytest.approx(duty_ratio_closed_form(phi, th, dv), rel=1e-9)


def test_rho_minimised_at_coverage_edge():
    vals = [duty_ratio(5.0, th, 0.456) for th in range(0, 60, 5)]
    assert min(vals) == vals[0]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_plan_and_validation():
    plan = plan_sweep(5.0, 0.0, 0.45)
    assert plan.T_radar == pytest.approx(sweep_interval(plan.geometry.r, 30.0))
    assert plan.n_cpi == 10
    assert validate_plan(plan) == []
    whole = plan_sweep(120.0, 0.0, 1.5)
    probs = validate_plan(whole)
    assert len(probs) == 1 and "12.0" in probs[0]
    tiny = plan_sweep(0.3, 0.0, 0.45)
    assert any("degenerate" in p for p in validate_plan(tiny))
    short = SweepPlan(RadarTiming.for_resolution(0.45), SectorGeometry(5.0, 120.0, 60.0, 1.0))
    assert any("sector length" in p for p in validate_plan(short))
    with pytest.raises(ValueError):
        SectorGeometry(100, 120, 100, 30)
