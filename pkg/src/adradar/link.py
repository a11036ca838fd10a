"""Line-of-sight link budget, MCS selection and average rate over a pass."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CARRIER_FREQ


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class LinkParams:
    P_tx: float = 10.0  # dBm
    n: float = 2.66
    C_att: float = 70.0  # dB
    A_att_per_km: float = 15.0
    R_att_per_km: float = 25.0
    N_floor: float = -174.0  # dBm/Hz
    B: float = 2.16e9
    NF: float = 6.0
    sigma_sf: float = 5.8
    f_c: float = CARRIER_FREQ

    def __post_init__(self):
        if min(self.C_att, self.A_att_per_km, self.R_att_per_km) < 0:
            raise ValueError("attenuations must be non-negative")
        if self.B <= 0:
            raise ValueError("bandwidth must be positive")
        if self.sigma_sf < 0:
            raise ValueError("shadowing std must be non-negative")


@dataclass(frozen=True)
class McsEntry:
    index: int
    phy: str  # "CPHY" or "SC"
    rate_bps: float
    min_snr_db: float
    psdu_octets: int = 4096
    gamma: float = 0.01


# Rate ladder of the 802.11ad control and SC PHYs. Minimum SNRs derive from
# the standard's receiver sensitivities against a 10 dB-NF thermal floor
# over 2.16 GHz; MCS5 is nudged below MCS6 so thresholds rise with rate.
_SENSITIVITY_OFFSET = 174.0 - 10.0 * math.log10(2.16e9) - 10.0
_DEFAULT_LADDER = [
    (0, "CPHY", 27.5e6, -78.0),
    (1, "SC", 385e6, -68.0),
    (2, "SC", 770e6, -66.0),
    (3, "SC", 962.5e6, -65.0),
    (4, "SC", 1155e6, -64.0),
    (5, "SC", 1251.25e6, -63.5),
    (6, "SC", 1540e6, -63.0),
    (7, "SC", 1925e6, -62.0),
    (8, "SC", 2310e6, -61.0),
    (9, "SC", 2502.5e6, -59.0),
    (10, "SC", 3080e6, -55.0),
    (11, "SC", 3850e6, -54.0),
    (12, "SC", 4620e6, -53.0),
]


def default_mcs_table():
    table = []
    for idx, phy, rate, sens in _DEFAULT_LADDER:
        psdu, gamma = (256, 0.05) if idx == 0 else (4096, 0.01)
        table.append(McsEntry(idx, phy, rate, round(sens + _SENSITIVITY_OFFSET, 2), psdu, gamma))
    return tuple(table)


def validate_mcs_table(table):
    if not table:
        raise ValueError("MCS table is empty")
    for phy in {e.phy for e in table}:
        rows = sorted((e for e in table if e.phy == phy), key=lambda e: e.min_snr_db)
        rates = [e.rate_bps for e in rows]
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError(f"{phy} rates must strictly increase with min_snr_db")


def path_loss(d_v, params, sf_sample=0.0):
    """Path loss in dB; atmospheric and rain terms scale with distance in km."""
    d_v = np.asarray(d_v, dtype=float)
    if np.any(d_v <= 0):
        raise ValueError("distance must be positive")
    return (10.0 * params.n * np.log10(d_v) + sf_sample + params.C_att
            + (params.A_att_per_km + params.R_att_per_km) * d_v / 1000.0)


def antenna_gain(theta_el_deg, theta_az_deg):
    """Ideal sector gain (linear), degrees form ``4 * 180**2 / (theta_el theta_az pi)``."""
    if not (0 < theta_el_deg <= 180 and 0 < theta_az_deg <= 180):
        raise ValueError("beamwidths must lie in (0, 180] degrees")
    return 4.0 * 180.0**2 / (theta_el_deg * theta_az_deg * math.pi)


def elevation_beamwidth(d, road_width=10.0):
    """Elevation beamwidth (degrees) that spans the road width seen from distance ``d``."""
    if d <= 0 or road_width <= 0:
        raise ValueError("d and road_width must be positive")
    return 2.0 * math.degrees(math.atan(road_width / (2.0 * d)))


def noise_power(params):
    """Thermal noise power in dBm."""
    return params.N_floor + 10.0 * math.log10(params.B) + params.NF


def snr(theta_az_deg, d_v, params, sf_sample=0.0, theta_el_deg=None, d=None, road_width=10.0):
    """SNR in dB with identical Tx/Rx gains.

    ``theta_el_deg`` defaults to :func:`elevation_beamwidth` of the BS-road
    distance ``d`` (itself defaulting to ``d_v``).
    """
    if theta_el_deg is None:
        theta_el_deg = elevation_beamwidth(d_v if d is None else d, road_width)
    g_db = 10.0 * math.log10(antenna_gain(theta_el_deg, theta_az_deg))
    return params.P_tx + 2.0 * g_db - path_loss(d_v, params, sf_sample) - noise_power(params)


def select_mcs(snr_db, table=None):
    """Highest-rate entry whose threshold is met (``>=``); None means outage."""
    table = default_mcs_table() if table is None else table
    best = None
    for e in table:
        if snr_db >= e.min_snr_db and (best is None or e.rate_bps > best.rate_bps):
            best = e
    return best


def rate_for_snr(snr_db, table=None):
    """Vectorised achievable rate (bps) for an array of SNRs; 0 in outage."""
    table = default_mcs_table() if table is None else table
    thr = np.array([e.min_snr_db for e in table])
    rates = np.array([e.rate_bps for e in table])
    snr_db = np.asarray(snr_db, dtype=float)
    ok = snr_db[..., None] >= thr
    return np.where(ok, rates, 0.0).max(axis=-1)


def contact_time(d, phi_BS_deg, v):
    if v <= 0:
        raise ValueError("vehicle speed must be positive")
    return 2.0 * d * math.tan(math.radians(phi_BS_deg) / 2.0) / v


@dataclass(frozen=True)
class PassGeometry:
    d: float = 100.0
    phi_BS_deg: float = 120.0
    theta_az_deg: float = 3.0
    road_width: float = 10.0
    theta_el_deg: float | None = None

    @property
    def elevation_deg(self):
        if self.theta_el_deg is not None:
            return self.theta_el_deg
        return elevation_beamwidth(self.d, self.road_width)


@dataclass
class RateResult:
    average_rate_bps: float
    outage_fraction: float
    contact_time_s: float
    times: np.ndarray = field(repr=False)
    rates: np.ndarray = field(repr=False)


def rate_profile(geometry, v, params, table=None, dt=1e-3, rng=None):
    """Midpoint samples of the achievable rate along one pass.

    The vehicle enters the coverage at ``y = -d tan(phi_BS/2)`` and moves
    at constant speed ``v``; shadowing is drawn per step from ``rng`` or
    held at 0 when ``rng`` is None.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t_c = contact_time(geometry.d, geometry.phi_BS_deg, v)
    n = max(1, math.ceil(t_c / dt - 1e-9))
    edges = np.minimum(np.arange(n + 1) * dt, t_c)
    mid = 0.5 * (edges[:-1] + edges[1:])
    weights = np.diff(edges)
    y = -geometry.d * math.tan(math.radians(geometry.phi_BS_deg) / 2.0) + v * mid
    d_v = np.hypot(geometry.d, y)
    sf = 0.0 if rng is None else rng.normal(0.0, params.sigma_sf, size=d_v.shape)
    s = snr(geometry.theta_az_deg, d_v, params, sf, theta_el_deg=geometry.elevation_deg)
    return mid, weights, rate_for_snr(s, table), t_c


def average_rate(geometry, v, params, table=None, dt=1e-3, rng=None):
    """Time-average of the achievable rate over the contact interval."""
    mid, weights, rates, t_c = rate_profile(geometry, v, params, table, dt, rng)
    avg = float(np.sum(rates * weights) / t_c)
    outage = float(np.sum(weights[rates == 0]) / t_c)
    return RateResult(avg, outage, t_c, mid, rates)
