"""INI experiment configuration with one section per module.

Every key in ``SCHEMA`` must be present; unknown keys are rejected so typos
surface as named-key errors instead of silently falling back.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources

from .channel import DopplerConvention
from .golay import FrameKind
from .link import LinkParams
from .mac import BeamGeometry, MacConfig, Scenario, Vehicle
from .planner import RadarTiming, SectorGeometry, SweepPlan


class ConfigError(ValueError):
    pass


def _floats(text):
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


SCHEMA = {
    "radar": {
        "frame_kind": FrameKind.parse,
        "doppler_convention": DopplerConvention.parse,
        "pulses": int,
        "n_range_bins": int,
        "n_targets": int,
        "snr_db": float,
        "pfa": float,
        "cfar_guard": int,
        "cfar_train": int,
    },
    "planner": {
        "doppler_resolution_mps": float,
        "theta_radar_deg": float,
        "phi_sradar_deg": float,
        "theta_start_deg": float,
        "d_m": float,
        "phi_bs_deg": float,
        "v_max_mps": float,
        "w_car_m": float,
        "k1": float,
        "k2_m": float,
    },
    "link": {
        "p_tx_dbm": float,
        "path_loss_exponent": float,
        "c_att_db": float,
        "a_att_db_per_km": float,
        "r_att_db_per_km": float,
        "n_floor_dbm_per_hz": float,
        "bandwidth_hz": float,
        "noise_figure_db": float,
        "shadowing_sigma_db": float,
        "theta_az_deg": float,
        "road_width_m": float,
        "dt_s": float,
    },
    "mac": {
        "bi_duration_s": float,
        "beacon_frame_s": float,
        "ssw_frame_s": float,
        "feedback_s": float,
        "ack_s": float,
        "mbifs_s": float,
        "ati_s": float,
        "s_i": int,
        "s_r": int,
        "abft_slots": int,
    },
    "scenario": {
        "overlap_ratio": float,
        "vehicle_offsets_m": _floats,
        "vehicle_speeds_mps": _floats,
        "w_car_m": float,
        "trials": int,
        "time_step_s": float,
    },
}


def default_config_text():
    return resources.files("adradar").joinpath("data/default.ini").read_text(encoding="utf-8")


def parse_config(text, source="<config>"):
    """Parse INI text into ``{section: {key: typed value}}``."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out = {}
    for section, keys in SCHEMA.items():
        if not cp.has_section(section):
            raise ConfigError(f"{source}: missing section [{section}]")
        given = set(cp[section].keys())
        unknown = given - set(keys)
        if unknown:
            raise ConfigError(f"{source}: unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
        vals = {}
        for key, conv in keys.items():
            if key not in given:
                raise ConfigError(f"{source}: missing key '{key}' in section [{section}]")
            try:
                vals[key] = conv(cp[section][key])
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for [{section}] {key}: {exc}") from None
        out[section] = vals
    return out


def load_config(path=None):
    if path is None:
        return parse_config(default_config_text(), "default.ini")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


@dataclass(frozen=True)
class Experiment:
    """Typed objects built from a parsed config."""

    raw: dict
    link: LinkParams
    mac: MacConfig
    plan: SweepPlan
    scenario: Scenario

    @property
    def radar(self):
        return self.raw["radar"]


def build_plan(raw, dv=None, phi_Sradar_deg=None, theta_start_deg=None):
    pl = raw["planner"]
    kind = raw["radar"]["frame_kind"]
    dv = pl["doppler_resolution_mps"] if dv is None else dv
    timing = RadarTiming.for_resolution(dv, kind, theta_radar_deg=pl["theta_radar_deg"])
    geometry = SectorGeometry(
        pl["d_m"], pl["phi_bs_deg"],
        pl["theta_start_deg"] if theta_start_deg is None else theta_start_deg,
        pl["phi_sradar_deg"] if phi_Sradar_deg is None else phi_Sradar_deg,
    )
    return SweepPlan(timing, geometry, pl["v_max_mps"], pl["k1"], pl["k2_m"])


def build_experiment(raw, dv=None, overlap_ratio=None):
    """Turn a parsed config into model objects, raising ConfigError on invariant violations."""
    try:
        lk, mc, sc, pl = raw["link"], raw["mac"], raw["scenario"], raw["planner"]
        link = LinkParams(lk["p_tx_dbm"], lk["path_loss_exponent"], lk["c_att_db"],
                          lk["a_att_db_per_km"], lk["r_att_db_per_km"], lk["n_floor_dbm_per_hz"],
                          lk["bandwidth_hz"], lk["noise_figure_db"], lk["shadowing_sigma_db"])
        mac = MacConfig(mc["bi_duration_s"], mc["beacon_frame_s"], mc["ssw_frame_s"], mc["feedback_s"],
                        mc["ack_s"], mc["mbifs_s"], mc["ati_s"], mc["s_i"], mc["s_r"], mc["abft_slots"])
        plan = build_plan(raw, dv=dv)
        geometry = BeamGeometry(pl["d_m"], pl["phi_bs_deg"], lk["theta_az_deg"], None,
                                sc["overlap_ratio"] if overlap_ratio is None else overlap_ratio)
        offsets, speeds = sc["vehicle_offsets_m"], sc["vehicle_speeds_mps"]
        if len(offsets) != len(speeds):
            raise ConfigError("[scenario] vehicle_offsets_m and vehicle_speeds_mps differ in length")
        y_entry = -geometry.road_length / 2.0
        vehicles = [Vehicle(y_entry + o, v, sc["w_car_m"]) for o, v in zip(offsets, speeds)]
        scenario = Scenario(geometry, plan, vehicles)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return Experiment(raw, link, mac, plan, scenario)
