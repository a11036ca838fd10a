"""Radar design arithmetic: PRI, resolutions, scan time, sector geometry, duty ratio.

Angles are in degrees at every public boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import CHIP_TIME, SPEED_OF_LIGHT, WAVELENGTH
from .golay import FrameKind

THETA_RADAR_DEG = 0.5  # radar scan rate, degrees per CPI
_FLOOR_EPS = 1e-9


def min_pri(kind, chip_time=CHIP_TIME):
    """Shortest PRI: one full preamble (STF + CEF)."""
    return FrameKind.parse(kind).preamble_len * chip_time


def range_resolution(chip_time=CHIP_TIME):
    return SPEED_OF_LIGHT * chip_time / 2.0


def max_unambiguous_velocity(T_pr, wavelength=WAVELENGTH):
    if T_pr <= 0:
        raise ValueError("T_pr must be positive")
    return wavelength / T_pr


def doppler_resolution(P, T_pr, wavelength=WAVELENGTH):
    if P <= 0 or T_pr <= 0:
        raise ValueError("P and T_pr must be positive")
    return wavelength / (2.0 * P * T_pr)


def cpi_for_resolution(target_dv, wavelength=WAVELENGTH):
    """CPI length that achieves Doppler resolution ``target_dv`` exactly."""
    if target_dv <= 0:
        raise ValueError("target Doppler resolution must be positive")
    return wavelength / (2.0 * target_dv)


def packets_for_resolution(target_dv, T_pr, wavelength=WAVELENGTH):
    """Smallest P with ``lambda / (2 P T_pr) <= target_dv``."""
    if T_pr <= 0:
        raise ValueError("T_pr must be positive")
    ratio = cpi_for_resolution(target_dv, wavelength) / T_pr
    P = math.ceil(ratio - _FLOOR_EPS * max(1.0, ratio))
    return max(P, 1)


def _cpi_count(phi_Sradar_deg, theta_radar_deg):
    if theta_radar_deg <= 0:
        raise ValueError("theta_radar must be positive")
    q = phi_Sradar_deg / theta_radar_deg
    return math.floor(q + _FLOOR_EPS * max(1.0, abs(q)))


def scan_time(phi_Sradar_deg, T_int, theta_radar_deg=THETA_RADAR_DEG):
    """``T_int * floor(phi_Sradar / theta_radar)``; ``T_int`` may be a RadarTiming."""
    if isinstance(T_int, RadarTiming):
        theta_radar_deg = T_int.theta_radar_deg
        T_int = T_int.T_int
    if phi_Sradar_deg < 0:
        raise ValueError("sector size must be non-negative")
    return T_int * _cpi_count(phi_Sradar_deg, theta_radar_deg)


def sector_length(d, phi_BS_deg, theta_start_deg, phi_Sradar_deg):
    """Road length covered by a radar sector starting ``theta_start`` from the coverage edge."""
    if d <= 0:
        raise ValueError("BS-road distance must be positive")
    if theta_start_deg < 0 or phi_Sradar_deg < 0:
        raise ValueError("sector angles must be non-negative")
    if theta_start_deg + phi_Sradar_deg > phi_BS_deg + 1e-12:
        raise ValueError("radar sector exceeds the BS coverage angle")
    half = phi_BS_deg / 2.0
    return d * (math.tan(math.radians(half - theta_start_deg))
                - math.tan(math.radians(half - theta_start_deg - phi_Sradar_deg)))


def sweep_interval(r, v_max):
    """Longest interval between sweeps so no vehicle crosses the sector unseen."""
    if r < 0 or v_max <= 0:
        raise ValueError("need r >= 0 and v_max > 0")
    return r / v_max


@dataclass(frozen=True)
class RadarTiming:
    kind: FrameKind = FrameKind.CPHY
    T_pr: float = field(default_factory=lambda: min_pri(FrameKind.CPHY))
    P: int = 1
    wavelength: float = WAVELENGTH
    theta_radar_deg: float = THETA_RADAR_DEG
    chip_time: float = CHIP_TIME

    def __post_init__(self):
        object.__setattr__(self, "kind", FrameKind.parse(self.kind))
        if self.P < 1 or int(self.P) != self.P:
            raise ValueError("P must be a positive integer")
        if self.T_pr < min_pri(self.kind, self.chip_time) * (1 - 1e-12):
            raise ValueError(f"T_pr={self.T_pr} is shorter than the {self.kind.name} preamble")

    @property
    def T_int(self):
        return self.P * self.T_pr

    @property
    def doppler_resolution(self):
        return doppler_resolution(self.P, self.T_pr, self.wavelength)

    @property
    def max_unambiguous_velocity(self):
        return max_unambiguous_velocity(self.T_pr, self.wavelength)

    @classmethod
    def for_resolution(cls, target_dv, kind=FrameKind.CPHY, stretch_pri=True, **kw):
        """Timing reaching ``target_dv`` with the fewest packets.

        With ``stretch_pri`` P is the number of whole minimum PRIs that fit
        in the required CPI and the PRI is lengthened so ``P * T_pr`` hits
        it exactly. Otherwise the minimum PRI is kept and P is rounded up,
        so the CPI overshoots by less than one PRI.
        """
        kind = FrameKind.parse(kind)
        wavelength = kw.get("wavelength", WAVELENGTH)
        chip_time = kw.get("chip_time", CHIP_TIME)
        t_min = min_pri(kind, chip_time)
        cpi = cpi_for_resolution(target_dv, wavelength)
        if stretch_pri:
            ratio = cpi / t_min
            P = max(1, math.floor(ratio + _FLOOR_EPS * max(1.0, ratio)))
            T_pr = cpi / P
        else:
            P = packets_for_resolution(target_dv, t_min, wavelength)
            T_pr = t_min
        return cls(kind=kind, T_pr=max(T_pr, t_min), P=P, **kw)


@dataclass(frozen=True)
class SectorGeometry:
    d: float = 100.0
    phi_BS_deg: float = 120.0
    theta_start_deg: float = 0.0
    phi_Sradar_deg: float = 5.0

    def __post_init__(self):
        if self.theta_start_deg < 0:
            raise ValueError("theta_start must be non-negative")
        if self.theta_start_deg + self.phi_Sradar_deg > self.phi_BS_deg + 1e-12:
            raise ValueError("theta_start + phi_Sradar exceeds phi_BS")
        if self.d <= 0:
            raise ValueError("d must be positive")

    @property
    def r(self):
        return sector_length(self.d, self.phi_BS_deg, self.theta_start_deg, self.phi_Sradar_deg)


@dataclass(frozen=True)
class SweepPlan:
    timing: RadarTiming
    geometry: SectorGeometry
    v_max: float = 30.0
    k1: float = 1.0
    k2: float = 5.0

    @property
    def t_radar(self):
        return scan_time(self.geometry.phi_Sradar_deg, self.timing)

    @property
    def T_radar(self):
        return sweep_interval(self.geometry.r, self.v_max)

    @property
    def rho(self):
        return self.t_radar / self.T_radar

    @property
    def n_cpi(self):
        return _cpi_count(self.geometry.phi_Sradar_deg, self.timing.theta_radar_deg)


def plan_sweep(phi_Sradar_deg=5.0, theta_start_deg=0.0, dv=0.454, d=100.0, phi_BS_deg=120.0,
               v_max=30.0, kind=FrameKind.CPHY, k1=1.0, k2=5.0, stretch_pri=True):
    timing = RadarTiming.for_resolution(dv, kind, stretch_pri=stretch_pri)
    geometry = SectorGeometry(d, phi_BS_deg, theta_start_deg, phi_Sradar_deg)
    return SweepPlan(timing, geometry, v_max, k1, k2)


def duty_ratio(phi_Sradar_deg=5.0, theta_start_deg=0.0, dv=0.454, d=100.0, phi_BS_deg=120.0,
               v_max=30.0, theta_radar_deg=THETA_RADAR_DEG, wavelength=WAVELENGTH):
    """``t_radar / T_radar`` composed from scan time and sweep interval."""
    t = scan_time(phi_Sradar_deg, cpi_for_resolution(dv, wavelength), theta_radar_deg)
    return t / sweep_interval(sector_length(d, phi_BS_deg, theta_start_deg, phi_Sradar_deg), v_max)


def duty_ratio_closed_form(phi_Sradar_deg, theta_start_deg, dv, d=100.0, phi_BS_deg=120.0,
                           v_max=30.0, wavelength=WAVELENGTH):
    # Only meaningful for a 0.5 deg/CPI scan rate with phi in degrees.
    r = sector_length(d, phi_BS_deg, theta_start_deg, phi_Sradar_deg)
    return phi_Sradar_deg * wavelength * v_max / (dv * r)


def validate_plan(plan, w_car=5.0, k1=None, k2=None):
    """Return a list of violated design constraints (empty when the plan is feasible)."""
    k1 = plan.k1 if k1 is None else k1
    k2 = plan.k2 if k2 is None else k2
    problems = []
    if plan.n_cpi == 0:
        problems.append(
            f"degenerate plan: sector {plan.geometry.phi_Sradar_deg} deg is narrower than one "
            f"CPI step of {plan.timing.theta_radar_deg} deg"
        )
    r = plan.geometry.r
    if not r > k1 * w_car:
        problems.append(f"sector length r={r:.2f} m is not longer than k1*w_car={k1 * w_car:.2f} m")
    moved = plan.v_max * plan.t_radar
    if not moved < k2:
        problems.append(f"vehicle moves {moved:.2f} m during the sweep, limit k2={k2:.2f} m")
    return problems
