"""802.11ad beacon-header timing, beam sectors and Monte Carlo beam misalignment.

Road frame: the road runs parallel to the BS baseline at distance ``d``;
``y = 0`` is broadside and vehicles travel from ``y = -L/2`` (coverage
entry, where the radar sector sits) to ``y = +L/2`` with
``L = 2 d tan(phi_BS / 2)``.  Beam angles are measured from broadside.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .planner import SweepPlan, plan_sweep, range_resolution

_TRIAL_CHUNK = 32


@dataclass(frozen=True)
class MacConfig:
    """Beacon-interval timing (seconds).

    The frame durations are calibration constants: with ``S_I = S_R = 32``
    and four A-BFT slots they make the legacy BHI last 10.72 ms.
    """

    bi_duration: float = 30e-3
    beacon_frame_dur: float = 0.26671875e-3
    ssw_frame_dur: float = 16e-6
    feedback_dur: float = 16e-6
    ack_dur: float = 16e-6
    mbifs: float = 9e-6
    ati_duration: float = 0.0
    S_I: int = 32
    S_R: int = 32
    abft_slots: int = 4

    def __post_init__(self):
        durations = (self.bi_duration, self.beacon_frame_dur, self.ssw_frame_dur,
                     self.feedback_dur, self.ack_dur, self.mbifs)
        if any(x <= 0 for x in durations):
            raise ValueError("frame and interval durations must be positive")
        if self.ati_duration < 0:
            raise ValueError("ATI duration must be non-negative")
        if self.S_I < 1 or self.S_R < 1 or self.abft_slots < 0:
            raise ValueError("need S_I >= 1, S_R >= 1 and abft_slots >= 0")


def legacy_bhi_duration(cfg):
    """BTI sweep over ``S_I`` sectors, MBIFS, then A-BFT slots of ``S_R`` SSW frames."""
    bti = cfg.S_I * cfg.beacon_frame_dur
    abft = cfg.abft_slots * (cfg.S_R * cfg.ssw_frame_dur + cfg.feedback_dur + cfg.ack_dur)
    return bti + cfg.mbifs + abft + cfg.ati_duration


def radar_bhi_duration(cfg, plan, n_vehicles=0):
    """Radar-assisted BHI.

    The radar sweep doubles as the BTI synchronisation; each detected
    vehicle then gets one assignment beacon and a dedicated A-BFT slot with
    a single responder sector.
    """
    if n_vehicles < 0:
        raise ValueError("n_vehicles must be non-negative")
    t = plan.t_radar + cfg.ati_duration
    if n_vehicles:
        slot = cfg.ssw_frame_dur + cfg.feedback_dur + cfg.ack_dur
        t += n_vehicles * cfg.beacon_frame_dur + cfg.mbifs + n_vehicles * slot
    return t


def overhead_fraction(bhi_dur, repeat_interval):
    """Percentage of air time spent in beam training."""
    if repeat_interval <= 0 or bhi_dur < 0:
        raise ValueError("need bhi_dur >= 0 and repeat_interval > 0")
    return 100.0 * bhi_dur / repeat_interval


@dataclass(frozen=True)
class BeamGeometry:
    d: float = 100.0
    phi_BS_deg: float = 120.0
    theta_az_deg: float = 3.0
    theta_el_deg: float | None = None
    overlap_ratio: float = 0.7

    def __post_init__(self):
        if not 0.0 <= self.overlap_ratio < 1.0:
            raise ValueError(f"overlap_ratio must lie in [0, 1), got {self.overlap_ratio}")
        if not 0.0 < self.theta_az_deg < 180.0:
            raise ValueError("theta_az must lie in (0, 180) degrees")
        if self.d <= 0 or self.phi_BS_deg <= 0:
            raise ValueError("d and phi_BS must be positive")

    @property
    def road_length(self):
        return 2.0 * self.d * math.tan(math.radians(self.phi_BS_deg) / 2.0)


@dataclass(frozen=True)
class BeamSectorSet:
    lower_deg: np.ndarray
    upper_deg: np.ndarray
    stride_deg: float

    def __len__(self):
        return len(self.lower_deg)

    @property
    def centers_deg(self):
        return 0.5 * (self.lower_deg + self.upper_deg)

    def nearest(self, angle_deg):
        """Index of the sector whose unclamped centre is closest to ``angle_deg``."""
        first_center = self.lower_deg[0] + 0.5 * (self.upper_deg[0] - self.lower_deg[0])
        idx = np.rint((np.asarray(angle_deg) - first_center) / self.stride_deg)
        return np.clip(idx, 0, len(self) - 1).astype(np.int64)

    def covering(self, angle_deg):
        a = float(angle_deg)
        return [i for i in range(len(self)) if self.lower_deg[i] <= a <= self.upper_deg[i]]


def build_sectors(geometry):
    """Tile ``[-phi_BS/2, phi_BS/2]`` from the entry edge with overlapping beams."""
    width = geometry.theta_az_deg
    half = geometry.phi_BS_deg / 2.0
    stride = width * (1.0 - geometry.overlap_ratio)
    span = geometry.phi_BS_deg - width
    n = 1 if span <= 0 else math.ceil(span / stride - 1e-9) + 1
    lower = -half + stride * np.arange(n)
    upper = np.minimum(lower + width, half)
    lower.setflags(write=False)
    upper.setflags(write=False)
    return BeamSectorSet(lower, upper, stride)


@dataclass(frozen=True)
class Vehicle:
    y_m: float  # road position at the radar fix
    v_mps: float
    w_car: float = 5.0

    def __post_init__(self):
        if self.v_mps <= 0:
            raise ValueError("vehicles must move in +y with positive speed")


def default_vehicles(geometry=None, plan=None):
    """Six cars, one per car length inside the radar sector, 20-30 m/s."""
    geometry = BeamGeometry() if geometry is None else geometry
    r = plan.geometry.r if plan is not None else 30.0
    y_entry = -geometry.road_length / 2.0
    offsets = [2.5, 7.5, 12.5, 17.5, 22.5, 27.5]
    speeds = [30.0, 28.0, 26.0, 24.0, 22.0, 20.0]
    return tuple(Vehicle(y_entry + min(o, r), v) for o, v in zip(offsets, speeds))


@dataclass(frozen=True)
class Scenario:
    geometry: BeamGeometry = field(default_factory=BeamGeometry)
    plan: SweepPlan = field(default_factory=plan_sweep)
    vehicles: tuple = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        half = self.geometry.road_length / 2.0
        for veh in self.vehicles:
            if veh.v_mps > self.plan.v_max + 1e-9:
                raise ValueError(f"vehicle speed {veh.v_mps} exceeds v_max {self.plan.v_max}")
            if not -half <= veh.y_m < half:
                raise ValueError(f"vehicle at y={veh.y_m} m is outside the coverage area")

    @classmethod
    def default(cls, **kw):
        geometry = kw.pop("geometry", BeamGeometry())
        plan = kw.pop("plan", plan_sweep(d=geometry.d, phi_BS_deg=geometry.phi_BS_deg))
        vehicles = kw.pop("vehicles", default_vehicles(geometry, plan))
        return cls(geometry, plan, vehicles, **kw)


@dataclass
class MisalignmentCDF:
    positions_m: np.ndarray  # distance travelled from the coverage entry
    probability: np.ndarray
    first_misaligned_m: np.ndarray = field(repr=False)  # inf where never misaligned

    @property
    def at_coverage_end(self):
        return float(self.probability[-1])


def _fix_estimates(y0, v, u_range, u_vel, dR, dv):
    # Quantisation model: errors uniform within half a resolution bin.
    return y0 + u_range * dR, v + u_vel * dv


def _road_cells(sectors, d):
    # Sector selection by nearest centre angle becomes a search over the
    # road positions of the midpoints between successive centres.
    first_center = sectors.lower_deg[0] + 0.5 * (sectors.upper_deg[0] - sectors.lower_deg[0])
    centers = first_center + sectors.stride_deg * np.arange(len(sectors))
    mids = d * np.tan(np.radians(0.5 * (centers[:-1] + centers[1:])))
    lo = d * np.tan(np.radians(sectors.lower_deg))
    hi = d * np.tan(np.radians(sectors.upper_deg))
    return mids, lo, hi


def _first_misalignment(y0, v, y_hat, v_hat, geometry, sectors, dt):
    half = geometry.road_length / 2.0
    mids, lo, hi = _road_cells(sectors, geometry.d)
    n_steps = int(math.ceil(np.max((half - y0) / v) / dt)) + 1
    t = np.arange(n_steps) * dt
    y = y0[:, None] + v[:, None] * t[None, :]
    idx = np.searchsorted(mids, y_hat[:, None] + v_hat[:, None] * t[None, :])
    bad = (y <= half) & ((y < lo[idx]) | (y > hi[idx]))
    any_bad = bad.any(axis=1)
    first = np.argmax(bad, axis=1)
    pos = y[np.arange(len(y0)), first] + half
    return np.where(any_bad, pos, np.inf)


def _trial_chunk(args):
    trials, scenario, sectors, dR, dv, dt, seed = args
    veh = scenario.vehicles
    y0 = np.tile([x.y_m for x in veh], len(trials))
    v = np.tile([x.v_mps for x in veh], len(trials))
    u = np.vstack([np.random.default_rng([seed, int(k)]).uniform(-0.5, 0.5, size=(len(veh), 2))
                   for k in trials])
    y_hat, v_hat = _fix_estimates(y0, v, u[:, 0], u[:, 1], dR, dv)
    return _first_misalignment(y0, v, y_hat, v_hat, scenario.geometry, sectors, dt)


def simulate_misalignment(scenario, n_trials, seed=None, dt=2e-3, position_step=1.0,
                          doppler_resolution=None, range_res=None, n_jobs=1):
    """CDF over road position of the first beam misalignment.

    Each trial draws, per vehicle, a position error uniform in ``+-dR/2`` and
    a velocity error uniform in ``+-dv/2`` at the radar fix. The BS
    then steers the sector nearest to the dead-reckoned angle; a sample is
    misaligned the first time the true angle leaves that sector. Trial ``k``
    uses its own generator keyed by ``(seed, k)``, so results do not depend
    on ``n_jobs``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if not scenario.vehicles:
        raise ValueError("scenario has no vehicles")
    seed = scenario.seed if seed is None else seed
    dv = scenario.plan.timing.doppler_resolution if doppler_resolution is None else doppler_resolution
    dR = range_resolution(scenario.plan.timing.chip_time) if range_res is None else range_res
    sectors = build_sectors(scenario.geometry)
    chunks = [range(s, min(s + _TRIAL_CHUNK, n_trials)) for s in range(0, n_trials, _TRIAL_CHUNK)]
    jobs = [(c, scenario, sectors, dR, dv, dt, seed) for c in chunks]
    if n_jobs == 1:
        parts = [_trial_chunk(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            parts = list(ex.map(_trial_chunk, jobs))
    first = np.concatenate(parts)
    L = scenario.geometry.road_length
    positions = np.arange(0.0, L + position_step, position_step)
    positions[-1] = min(positions[-1], L)
    sorted_first = np.sort(first)
    prob = np.searchsorted(sorted_first, positions, side="right") / len(first)
    return MisalignmentCDF(positions, prob, first)


@dataclass
class SimResult:
    misalignment_cdf: MisalignmentCDF | None
    bhi_time_legacy: float
    bhi_time_radar: float | None
    overhead_legacy_pct: float
    overhead_radar_pct: float | None
    reduction_pct: float | None


def run_comparison(scenario, cfg=None, n_trials=10_000, seed=None, legacy_only=False, n_jobs=1, **kw):
    """Legacy versus radar-assisted beam-training overhead, plus the misalignment CDF."""
    cfg = MacConfig() if cfg is None else cfg
    legacy = legacy_bhi_duration(cfg)
    oh_legacy = overhead_fraction(legacy, cfg.bi_duration)
    if legacy_only:
        return SimResult(None, legacy, None, oh_legacy, None, None)
    radar = radar_bhi_duration(cfg, scenario.plan, len(scenario.vehicles))
    oh_radar = overhead_fraction(radar, scenario.plan.T_radar)
    cdf = simulate_misalignment(scenario, n_trials, seed, n_jobs=n_jobs, **kw)
    reduction = 100.0 * (1.0 - oh_radar / oh_legacy)
    return SimResult(cdf, legacy, radar, oh_legacy, oh_radar, reduction)
