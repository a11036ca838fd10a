import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adradar.link import (
    LinkParams,
    McsEntry,
    PassGeometry,
    antenna_gain,
    average_rate,
    contact_time,
    default_mcs_table,
    elevation_beamwidth,
    noise_power,
    path_loss,
    rate_for_snr,
    select_mcs,
    snr,
    validate_mcs_table,
)

P0 = LinkParams()


def test_budget_by_hand():
    # 100 m, theta_az 3 deg, theta_el 5.72 deg, Table-1 parameters
    el = 2 * math.degrees(math.atan(10 / 200))
    g = 10 * math.log10(4 * 180**2 / (el * 3 * math.pi))
    pl = 26.6 * 2 + 70 + 40 * 0.1
    n = -174 + 10 * math.log10(2.16e9) + 6
    assert noise_power(P0) == pytest.approx(n)
    assert path_loss(100.0, P0) == pytest.approx(pl)
    assert elevation_beamwidth(100.0) == pytest.approx(el)
    assert snr(3.0, 100.0, P0) == pytest.approx(10 + 2 * g - pl - n)
    with pytest.raises(ValueError):
        path_loss(0.0, P0)
    with pytest.raises(ValueError):
        antenna_gain(0, 3)


def test_mcs_table_invariants():
    t = default_mcs_table()
    validate_mcs_table(t)
    sc = [e for e in t if e.phy == "SC"]
    assert all(b.min_snr_db > a.min_snr_db for a, b in zip(sc, sc[1:]))
    assert max(e.rate_bps for e in t) == 4620e6
    with pytest.raises(ValueError):
        validate_mcs_table([McsEntry(1, "SC", 2e9, 5.0), McsEntry(2, "SC", 1e9, 6.0)])
    with pytest.raises(ValueError):
        validate_mcs_table([])


def test_select_mcs_threshold_is_inclusive():
    t = default_mcs_table()
    e = t[7]
    assert select_mcs(e.min_snr_db, t).index == 7
    assert select_mcs(e.min_snr_db - 1e-9, t).index == 6
    assert select_mcs(-100.0, t) is None
    assert rate_for_snr(np.array([-100.0, e.min_snr_db]), t).tolist() == [0.0, e.rate_bps]


def test_contact_time():
    assert contact_time(100, 120, 30) == pytest.approx(200 * math.sqrt(3) / 30)
    with pytest.raises(ValueError):
        contact_time(100, 120, 0)


def test_average_rate_riemann_oracle():
    # Oracle: fine left Riemann sum over road position, independent of the midpoint grid
    g = PassGeometry(100.0, 120.0, 3.0)
    L = 200 * math.sqrt(3)
    y = np.linspace(-L / 2, L / 2, 400001)[:-1]
    s = snr(3.0, np.hypot(100.0, y), P0, theta_el_deg=g.elevation_deg)
    oracle = rate_for_snr(s).mean()
    got = average_rate(g, 30.0, P0, dt=1e-3).average_rate_bps
    assert got == pytest.approx(oracle, rel=2e-3)


def test_convergence_in_dt():
    g = PassGeometry(100.0, 120.0, 3.0)
    r = [average_rate(g, 30.0, P0, dt=dt).average_rate_bps for dt in (4e-3, 2e-3, 1e-3)]
    assert abs(r[2] - r[1]) / r[2] < 5e-3
    with pytest.raises(ValueError):
        average_rate(g, 30.0, P0, dt=0)


@settings(max_examples=25, deadline=None)
@given(st.floats(10, 290), st.floats(0.5, 30))
def test_monotone_in_distance_and_beamwidth(d, az):
    r = lambda d_, a_: average_rate(PassGeometry(d_, 120.0, a_), 30.0, P0, dt=5e-3).average_rate_bps
    assert r(d + 10, az) <= r(d, az) + 1e-6 * r(d, az)
    assert r(d, az * 1.5) <= r(d, az) + 1e-6 * r(d, az)


def test_shadowing_is_seeded():
    g = PassGeometry()
    a = average_rate(g, 30.0, P0, rng=np.random.default_rng(5))
    b = average_rate(g, 30.0, P0, rng=np.random.default_rng(5))
    assert a.average_rate_bps == b.average_rate_bps
    assert a.average_rate_bps != average_rate(g, 30.0, P0).average_rate_bps


def test_param_validation():
    with pytest.raises(ValueError):
        LinkParams(B=0)
    with pytest.raises(ValueError):
        LinkParams(sigma_sf=-1)
