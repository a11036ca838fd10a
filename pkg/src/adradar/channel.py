"""Multi-target echo model for a train of P preamble pulses."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .constants import CHIP_TIME, SPEED_OF_LIGHT, WAVELENGTH
from .golay import ChipSequence


class DopplerConvention(enum.Enum):
    """How radial velocity maps to Doppler frequency.

    ``PAPER`` uses ``f_D = v / lambda`` so that the unambiguous velocity is
    ``lambda / T_pr``; ``TWO_WAY`` is the physical round-trip ``2 v / lambda``.
    """

    PAPER = 1
    TWO_WAY = 2

    @property
    def factor(self):
        return float(self.value)

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"unknown Doppler convention {name!r}") from None


def doppler_frequency(velocity, convention=DopplerConvention.PAPER, wavelength=WAVELENGTH):
    return DopplerConvention.parse(convention).factor * np.asarray(velocity) / wavelength


def range_to_delay_chips(range_m, chip_time=CHIP_TIME):
    """Round-trip delay quantised to the chip grid."""
    return int(round(2.0 * range_m / SPEED_OF_LIGHT / chip_time))


def delay_chips_to_range(delay, chip_time=CHIP_TIME):
    return delay * SPEED_OF_LIGHT * chip_time / 2.0


@dataclass(frozen=True)
class Target:
    range_m: float
    radial_velocity_mps: float
    reflectivity: complex = 1.0 + 0j

    def __post_init__(self):
        if not self.range_m > 0:
            raise ValueError(f"target range must be positive, got {self.range_m}")


@dataclass(frozen=True)
class EchoConfig:
    P: int
    T_pr: float
    noise_power: float = 0.0
    seed: int = 0
    doppler_convention: DopplerConvention = DopplerConvention.PAPER
    n_range_bins: int = 1024
    wavelength: float = WAVELENGTH

    def __post_init__(self):
        object.__setattr__(self, "doppler_convention", DopplerConvention.parse(self.doppler_convention))
        if int(self.P) != self.P or self.P < 1:
            raise ValueError(f"P must be a positive integer, got {self.P}")
        if not self.T_pr > 0:
            raise ValueError("T_pr must be positive")
        if self.noise_power < 0:
            raise ValueError(f"noise_power must be non-negative, got {self.noise_power}")
        if int(self.n_range_bins) != self.n_range_bins or self.n_range_bins < 1:
            raise ValueError("n_range_bins must be a positive integer")


@dataclass(frozen=True)
class PulseTrain:
    """Received chip-rate samples, one row per pulse.

    Row ``p``, column ``n`` is the sample at ``p * T_pr + n * T_c``; each row
    holds ``n_range_bins + len(tx)`` samples so any echo delayed by up to
    ``n_range_bins`` chips fits entirely.
    """

    pulses: np.ndarray
    n_range_bins: int
    T_pr: float
    chip_time: float = CHIP_TIME

    def __post_init__(self):
        arr = np.array(self.pulses, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError("pulses must be a 2-D array (P, samples)")
        arr.setflags(write=False)
        object.__setattr__(self, "pulses", arr)

    @property
    def P(self):
        return self.pulses.shape[0]


def simulate_echo(tx, targets, cfg):
    """Sum of delayed, Doppler-rotated copies of ``tx`` plus circular AWGN.

    Pulse ``p`` carries the per-pulse phase ``exp(-j 2 pi f_D p T_pr)``; the
    phase is held constant within a pulse.
    """
    samples = tx.samples if isinstance(tx, ChipSequence) else np.asarray(tx, dtype=complex)
    chip_time = 1.0 / tx.chip_rate if isinstance(tx, ChipSequence) else CHIP_TIME
    n_tx = len(samples)
    width = cfg.n_range_bins + n_tx
    p_idx = np.arange(cfg.P)
    out = np.zeros((cfg.P, width), dtype=np.complex128)
    for tgt in targets:
        delay = range_to_delay_chips(tgt.range_m, chip_time)
        if delay > cfg.n_range_bins:
            raise ValueError(
                f"target at {tgt.range_m} m (delay {delay} chips) exceeds the "
                f"{cfg.n_range_bins}-bin pulse window"
            )
        f_d = doppler_frequency(tgt.radial_velocity_mps, cfg.doppler_convention, cfg.wavelength)
        phase = np.exp(-2j * np.pi * f_d * p_idx * cfg.T_pr)
        out[:, delay : delay + n_tx] += (tgt.reflectivity * phase)[:, None] * samples[None, :]
    if cfg.noise_power > 0:
        rng = np.random.default_rng(cfg.seed)
        scale = np.sqrt(cfg.noise_power / 2.0)
        out += scale * (rng.standard_normal(out.shape) + 1j * rng.standard_normal(out.shape))
    return PulseTrain(out, cfg.n_range_bins, cfg.T_pr, chip_time)


def write_pulses_csv(path, train):
    """One row per pulse, interleaved ``re_n,im_n`` columns."""
    n = train.pulses.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{part}_{k}" for k in range(n) for part in ("re", "im")])
        for row in train.pulses:
            w.writerow([repr(float(x)) for z in row for x in (z.real, z.imag)])
