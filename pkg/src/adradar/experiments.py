"""Batch experiments behind the command-line front-end.

Each runner takes an :class:`~adradar.config.Experiment`, a seed and a trial
count and returns ``(tables, summary)``: ``tables`` maps a CSV file name to
``(header, rows)`` and ``summary`` holds the headline numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import DopplerConvention, EchoConfig, Target, simulate_echo
from .config import build_experiment, build_plan
from .estimator import PulseDopplerRadar, noise_power_for_snr
from .golay import FrameKind, autocorrelation_sum, default_preamble, generate_golay_pair, standard_cef_pairs
from .link import PassGeometry, average_rate
from .mac import legacy_bhi_duration, overhead_fraction, radar_bhi_duration, simulate_misalignment
from .planner import (
    doppler_resolution,
    max_unambiguous_velocity,
    min_pri,
    range_resolution,
    sector_length,
    validate_plan,
)

EXPERIMENTS = (
    "golay-check",
    "radar-chain",
    "planner-sweep",
    "rate-sweep",
    "misalignment",
    "overhead",
    "reproduce-paper",
)

MISALIGN_DV = (0.45, 0.9, 1.5)
MISALIGN_OVERLAP = (0.5, 0.7, 0.9)


def golay_check(exp, seed, trials):
    rows = []
    worst = 0
    for k in range(1, 10):
        n = 2**k
        s = autocorrelation_sum(generate_golay_pair(n))
        off = int(np.max(np.abs(np.delete(s, n - 1))))
        worst = max(worst, off)
        rows.append((n, int(s[n - 1]), off, "recursive"))
    for name, pair in zip(("cef-u", "cef-v"), standard_cef_pairs()):
        s = autocorrelation_sum(pair)
        n = len(pair)
        off = int(np.max(np.abs(np.delete(s, n - 1))))
        worst = max(worst, off)
        rows.append((n, int(s[n - 1]), off, name))
    tables = {"golay_check.csv": (("n_chips", "peak", "max_offpeak_abs", "series"), rows)}
    return tables, {"golay_max_offpeak": worst, "golay_lengths_checked": len(rows)}


def _chain_scenario(rng, P, n_r, n_targets, convention):
    # Distinct Doppler bins keep each target's range sidelobes out of the others' columns.
    dop = rng.choice(P, size=n_targets, replace=False)
    delays = []
    while len(delays) < n_targets:
        m = int(rng.integers(16, n_r - 16))
        if all(abs(m - x) > 8 for x in delays):
            delays.append(m)
    if convention is DopplerConvention.TWO_WAY:
        signed = np.where(dop > P // 2, dop - P, dop)
    else:
        signed = dop
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_targets)
    return [(d, int(k), int(s), float(ph)) for d, k, s, ph in zip(delays, dop, signed, phases)]


def radar_chain(exp, seed, trials):
    r = exp.radar
    kind, conv = r["frame_kind"], r["doppler_convention"]
    P, n_r, n_t = r["pulses"], r["n_range_bins"], r["n_targets"]
    if n_t > P:
        raise ValueError(f"n_targets={n_t} exceeds the {P} Doppler bins")
    T_pr = min_pri(kind)
    dR = range_resolution()
    v_bin = exp.plan.timing.wavelength / (conv.factor * P * T_pr)
    rng = np.random.default_rng(seed)
    truth = _chain_scenario(rng, P, n_r, n_t, conv)
    targets = [Target(d * dR, s * v_bin, complex(np.exp(1j * ph))) for d, _, s, ph in truth]
    noise = noise_power_for_snr(r["snr_db"], 1.0, P)
    cfg = EchoConfig(P, T_pr, noise, seed, conv, n_r)
    preamble, u, v = default_preamble(kind)
    train = simulate_echo(preamble, targets, cfg)
    radar = PulseDopplerRadar(u, v, frame_kind=kind, n_range_bins=n_r, doppler_convention=conv.name,
                              pfa=r["pfa"], guard=r["cfar_guard"], train=r["cfar_train"], max_targets=n_t)
    dets = radar.fit(train).predict(train)
    truth_set = {(d, k) for d, k, _, _ in truth}
    det_rows = [(x.delay_bin, x.doppler_bin, x.range_m, x.velocity_mps, x.magnitude, x.snr_est,
                 int((x.delay_bin, x.doppler_bin) in truth_set)) for x in dets]
    truth_rows = [(d, k, d * dR, s * v_bin) for d, k, s, _ in truth]
    matched = sum(row[-1] for row in det_rows)
    tables = {
        "radar_truth.csv": (("delay_bin", "doppler_bin", "range_m", "velocity_mps"), truth_rows),
        "radar_detections.csv": (("delay_bin", "doppler_bin", "range_m", "velocity_mps", "magnitude",
                                  "snr_est_db", "matched"), det_rows),
    }
    summary = {
        "radar_targets": n_t,
        "radar_detections": len(dets),
        "radar_matched": matched,
        "radar_snr_db": r["snr_db"],
        "range_resolution_m": dR,
        "velocity_bin_mps": v_bin,
    }
    return tables, summary


def planner_sweep(exp, seed, trials):
    pl = exp.raw["planner"]
    lam = exp.plan.timing.wavelength
    t_min = min_pri(FrameKind.CPHY)
    pri = np.geomspace(t_min, 0.3e-3, 60)
    fig3a = [(t, max_unambiguous_velocity(t, lam), "nu_u") for t in pri]
    fig3b = []
    pri_series = (("cphy-min-pri", t_min), ("scphy-min-pri", min_pri(FrameKind.SCPHY)), ("pri-0.166ms", 0.166e-3))
    for label, t in pri_series:
        for P in (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768):
            fig3b.append((P, doppler_resolution(P, t, lam), label))
    fig5 = []
    for th in (0.0, 10.0, 20.0, 30.0, 40.0):
        for phi in np.arange(1.0, 21.0):
            plan = build_plan(exp.raw, phi_Sradar_deg=float(phi), theta_start_deg=th)
            fig5.append((float(phi), 100.0 * plan.rho, f"theta_start={th:g}deg"))
    whole = build_plan(exp.raw, dv=1.5, phi_Sradar_deg=pl["phi_bs_deg"])
    tables = {
        "fig3a_unambiguous_velocity.csv": (("pri_s", "nu_u_mps", "series"), fig3a),
        "fig3b_doppler_resolution.csv": (("packets", "doppler_resolution_mps", "series"), fig3b),
        "fig5_duty_ratio.csv": (("phi_sradar_deg", "rho_pct", "series"), fig5),
    }
    return tables, {**_plan_summary(exp), "whole_area_t_radar_s": whole.t_radar,
                    "whole_area_violations": validate_plan(whole, pl["w_car_m"])}


def _plan_summary(exp):
    plan = exp.plan
    return {
        "range_resolution_m": range_resolution(plan.timing.chip_time),
        "doppler_resolution_mps": plan.timing.doppler_resolution,
        "min_pri_cphy_s": min_pri(FrameKind.CPHY),
        "min_pri_scphy_s": min_pri(FrameKind.SCPHY),
        "pri_s": plan.timing.T_pr,
        "packets_per_cpi": plan.timing.P,
        "sector_length_m": plan.geometry.r,
        "t_radar_s": plan.t_radar,
        "T_radar_s": plan.T_radar,
        "rho": plan.rho,
    }


def rate_sweep(exp, seed, trials):
    lk, pl = exp.raw["link"], exp.raw["planner"]
    dt, v = lk["dt_s"], pl["v_max_mps"]

    def rbar(d, az, rng=None):
        g = PassGeometry(d, pl["phi_bs_deg"], az, lk["road_width_m"])
        return average_rate(g, v, exp.link, dt=dt, rng=rng)

    fig4a = [(d, rbar(d, az).average_rate_bps / 1e9, f"theta_az={az:g}deg")
             for az in (1.0, 3.0, 5.0, 10.0) for d in np.arange(10.0, 310.0, 10.0)]
    fig4b = [(az, rbar(d, az).average_rate_bps / 1e9, f"d={d:g}m")
             for d in (25.0, 50.0, 100.0, 150.0) for az in np.arange(1.0, 31.0)]
    rng = np.random.default_rng(seed)
    n_pass = max(1, min(trials, 200))
    shadowed = [rbar(pl["d_m"], lk["theta_az_deg"], rng) for _ in range(n_pass)]
    base = rbar(pl["d_m"], lk["theta_az_deg"])
    tables = {
        "fig4a_rate_vs_distance.csv": (("d_m", "avg_rate_gbps", "series"), fig4a),
        "fig4b_rate_vs_beamwidth.csv": (("theta_az_deg", "avg_rate_gbps", "series"), fig4b),
    }
    summary = {
        "avg_rate_gbps": base.average_rate_bps / 1e9,
        "contact_time_s": base.contact_time_s,
        "shadowed_passes": n_pass,
        "shadowed_avg_rate_gbps": float(np.mean([s.average_rate_bps for s in shadowed])) / 1e9,
        "shadowed_outage_fraction": float(np.mean([s.outage_fraction for s in shadowed])),
    }
    return tables, summary


def _cdf(exp_i, seed, trials, n_jobs):
    sc = exp_i.raw["scenario"]
    return simulate_misalignment(exp_i.scenario, trials, seed, dt=sc["time_step_s"], n_jobs=n_jobs)


def misalignment(exp, seed, trials, n_jobs=1):
    base_dv = exp.raw["planner"]["doppler_resolution_mps"]
    base_ov = exp.raw["scenario"]["overlap_ratio"]
    runs = {}
    rows = []
    summary = {"misalignment_trials": trials}
    for dv, ov, label in ([(dv, base_ov, f"dv={dv:g}mps") for dv in MISALIGN_DV]
                          + [(base_dv, ov, f"overlap={ov:g}") for ov in MISALIGN_OVERLAP]):
        key = (dv, ov)
        if key not in runs:
            runs[key] = _cdf(build_experiment(exp.raw, dv=dv, overlap_ratio=ov), seed, trials, n_jobs)
        cdf = runs[key]
        rows.extend((p, q, label) for p, q in zip(cdf.positions_m, cdf.probability))
        summary[f"misalignment_at_end[{label}]"] = cdf.at_coverage_end
    main = _cdf(exp, seed, trials, n_jobs) if (base_dv, base_ov) not in runs else runs[(base_dv, base_ov)]
    summary["misalignment_at_end"] = main.at_coverage_end
    tables = {"fig6_misalignment_cdf.csv": (("position_m", "probability", "series"), rows)}
    return tables, summary


def overhead(exp, seed, trials):
    cfg, plan = exp.mac, exp.plan
    n = len(exp.scenario.vehicles)
    legacy = legacy_bhi_duration(cfg)
    radar = radar_bhi_duration(cfg, plan, n)
    oh_l = overhead_fraction(legacy, cfg.bi_duration)
    oh_r = overhead_fraction(radar, plan.T_radar)
    rows = [
        ("legacy", legacy * 1e3, cfg.bi_duration * 1e3, oh_l),
        ("radar-assisted", radar * 1e3, plan.T_radar * 1e3, oh_r),
    ]
    tables = {"fig7_overhead.csv": (("scheme", "bhi_ms", "repeat_interval_ms", "overhead_pct"), rows)}
    summary = {
        "bhi_legacy_ms": legacy * 1e3,
        "bhi_radar_ms": radar * 1e3,
        "overhead_legacy_pct": oh_l,
        "overhead_radar_pct": oh_r,
        "reduction_pct": 100.0 * (1.0 - oh_r / oh_l),
        "n_vehicles": n,
    }
    return tables, summary


def reproduce_paper(exp, seed, trials, n_jobs=1):
    tables, summary = {}, {}
    for fn in (golay_check, planner_sweep, rate_sweep, overhead):
        t, s = fn(exp, seed, trials)
        tables.update(t)
        summary.update(s)
    t, s = misalignment(exp, seed, trials, n_jobs)
    tables.update(t)
    summary.update(s)
    summary["sector_length_check_m"] = sector_length(100.0, 120.0, 0.0, 5.0)
    return tables, summary


def run(name, exp, seed, trials, n_jobs=1):
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fn = {
        "golay-check": golay_check,
        "radar-chain": radar_chain,
        "planner-sweep": planner_sweep,
        "rate-sweep": rate_sweep,
        "overhead": overhead,
    }.get(name)
    if fn is not None:
        return fn(exp, seed, trials)
    if name == "misalignment":
        return misalignment(exp, seed, trials, n_jobs)
    return reproduce_paper(exp, seed, trials, n_jobs)


def fmt(x):
    """Stable text form for CSV cells and JSON floats."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return f"{x:.12g}"
    return str(x)
