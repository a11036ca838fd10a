"""Golay matched filtering, delay-Doppler maps and 2-D CA-CFAR detection.

Processing chain per CPI:

1. each pulse is correlated against the four 256-chip Golay blocks of the
   CEF; the ``u`` and ``v`` estimates are time-aligned, summed per pair
   (scaled by 1/512) and averaged;
2. for every delay bin a unitary DFT across the P channel estimates gives
   the delay-Doppler map;
3. a cell-averaging CFAR with guard and training rings picks the peaks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, signal
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .channel import DopplerConvention, PulseTrain
from .constants import CEF_LEN, CHIP_TIME, SPEED_OF_LIGHT, WAVELENGTH
from .golay import FrameKind, GolayPair, standard_cef_pairs

_BLOCK = 256


@dataclass(frozen=True)
class ChannelEstimate:
    h: np.ndarray
    pulse_index: int = 0

    @property
    def n_range_bins(self):
        return len(self.h)


@dataclass(frozen=True)
class DelayDopplerMap:
    """``magnitude[delay_bin, doppler_bin]`` of the unitary slow-time DFT."""

    magnitude: np.ndarray
    range_bin_m: float
    velocity_bin_mps: float
    doppler_convention: DopplerConvention = DopplerConvention.PAPER

    @property
    def shape(self):
        return self.magnitude.shape

    @property
    def fft_len(self):
        return self.magnitude.shape[1]

    def range_of(self, delay_bin):
        return delay_bin * self.range_bin_m

    def velocity_of(self, doppler_bin):
        """Bin centre velocity; TWO_WAY wraps to (-N/2, N/2], PAPER stays in [0, N)."""
        k = np.asarray(doppler_bin) % self.fft_len
        if self.doppler_convention is DopplerConvention.TWO_WAY:
            k = np.where(k > self.fft_len // 2, k - self.fft_len, k)
        return k * self.velocity_bin_mps

    def to_csv(self, path):
        """Delay-bin rows, Doppler-bin columns of linear magnitude."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["delay_bin"] + [f"doppler_{k}_mag" for k in range(self.fft_len)])
            for m, row in enumerate(self.magnitude):
                w.writerow([m] + [f"{x:.12e}" for x in row])


@dataclass(frozen=True)
class Detection:
    delay_bin: int
    doppler_bin: int
    range_m: float
    velocity_mps: float
    magnitude: float
    snr_est: float  # dB above the local CFAR noise estimate


def _as_pulse_matrix(x):
    if isinstance(x, PulseTrain):
        return x.pulses
    arr = np.asarray(x)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("expected a pulse train or a (P, samples) array")
    return arr


def channel_estimates(pulses, pair_u, pair_v, n_range_bins=None, cef_offset=0):
    """Vectorised :func:`estimate_channel` over the rows of ``pulses``."""
    x = _as_pulse_matrix(pulses)
    for name, p in (("pair_u", pair_u), ("pair_v", pair_v)):
        if len(p) != _BLOCK:
            raise ValueError(f"{name} must hold {_BLOCK}-chip sequences")
    avail = x.shape[1] - cef_offset - 4 * _BLOCK + 1
    if n_range_bins is None:
        n_range_bins = x.shape[1] - cef_offset - CEF_LEN
    if avail < 1 or n_range_bins < 1:
        raise ValueError(f"pulse of {x.shape[1]} samples is shorter than the CEF window")
    if n_range_bins > avail:
        raise ValueError(f"pulse too short for {n_range_bins} range bins (max {avail})")

    def corr(seq, shift):
        # y[n] = sum_m x[n + cef_offset + shift + m] * seq[m]
        seg = x[:, cef_offset + shift : cef_offset + shift + n_range_bins + _BLOCK - 1]
        return signal.fftconvolve(seg, seq[::-1].astype(float)[None, :], mode="valid", axes=1)

    h1 = (corr(pair_u.a, 0) + corr(pair_u.b, _BLOCK)) / (2 * _BLOCK)
    h2 = (corr(pair_v.a, 2 * _BLOCK) + corr(pair_v.b, 3 * _BLOCK)) / (2 * _BLOCK)
    return 0.5 * (h1 + h2)


def estimate_channel(pulse, pair_u, pair_v, n_range_bins=None, cef_offset=0, pulse_index=0):
    """Channel estimate of one pulse; bin ``n`` is range ``n * c T_c / 2``.

    ``cef_offset`` is the chip index of the CEF inside the transmitted pulse
    (the STF length when whole preambles are transmitted).
    """
    pulse = np.asarray(pulse)
    if pulse.ndim != 1:
        raise ValueError("estimate_channel expects a single 1-D pulse")
    h = channel_estimates(pulse, pair_u, pair_v, n_range_bins, cef_offset)[0]
    return ChannelEstimate(h, pulse_index)


def _velocity_bin(fft_len, T_pr, wavelength, convention):
    return wavelength / (DopplerConvention.parse(convention).factor * fft_len * T_pr)


def build_ddm(estimates, fft_len=None, T_pr=None, wavelength=WAVELENGTH,
              doppler_convention=DopplerConvention.PAPER, chip_time=CHIP_TIME):
    """Unitary ``fft_len``-point slow-time DFT of each delay bin.

    The kernel is ``exp(+j 2 pi k p / N)``, which maps the echo phase
    progression ``exp(-j 2 pi f_D p T_pr)`` to bin ``k = f_D N T_pr``.
    Parseval: per delay bin, the map energy equals the slow-time energy.
    """
    if isinstance(estimates, np.ndarray):
        h = np.atleast_2d(estimates)
    else:
        rows = [e.h if isinstance(e, ChannelEstimate) else np.asarray(e) for e in estimates]
        if len({len(r) for r in rows}) > 1:
            raise ValueError("channel estimates have inconsistent lengths")
        h = np.vstack(rows)
    P = h.shape[0]
    if P < 2:
        raise ValueError("need at least two pulses for a delay-Doppler map")
    fft_len = P if fft_len is None else int(fft_len)
    if fft_len < P:
        raise ValueError(f"fft_len ({fft_len}) must be >= P ({P})")
    spec = np.fft.ifft(h, n=fft_len, axis=0) * np.sqrt(fft_len)
    convention = DopplerConvention.parse(doppler_convention)
    vbin = _velocity_bin(fft_len, T_pr, wavelength, convention) if T_pr else np.nan
    return DelayDopplerMap(np.abs(spec).T, SPEED_OF_LIGHT * chip_time / 2.0, vbin, convention)


def _pad_map(x, w, fill):
    # Doppler axis is circular; range axis is padded with ``fill``.
    x = np.pad(x, ((w, w), (0, 0)), mode="constant", constant_values=fill)
    return np.pad(x, ((0, 0), (w, w)), mode="wrap")


def _cfar_window_sums(power, guard, train):
    w = guard + train
    kernel = np.ones((2 * w + 1, 2 * w + 1))
    kernel[train : train + 2 * guard + 1, train : train + 2 * guard + 1] = 0.0
    crop = (slice(w, -w), slice(w, -w))
    total = ndimage.correlate(_pad_map(power, w, 0.0), kernel, mode="constant")[crop]
    count = ndimage.correlate(_pad_map(np.ones_like(power), w, 0.0), kernel, mode="constant")[crop]
    return total, np.rint(count)


def _check_cfar_args(shape, pfa, guard, train):
    if not 0.0 < pfa < 1.0:
        raise ValueError(f"pfa must lie in (0, 1), got {pfa}")
    if guard < 0 or train < 1:
        raise ValueError("need guard >= 0 and train >= 1 cells")
    span = 2 * (guard + train) + 1
    if len(shape) != 2 or min(shape) < span:
        raise ValueError(f"map of shape {shape} cannot hold a {span}x{span} CFAR window")


def cfar_threshold(ddm, pfa=1e-3, guard=2, train=8):
    """Per-cell square-law CA-CFAR threshold and noise estimate.

    With ``N`` training cells of exponential power the scale
    ``N (pfa**(-1/N) - 1)`` yields the requested false-alarm probability.
    """
    mag = ddm.magnitude if isinstance(ddm, DelayDopplerMap) else np.asarray(ddm, dtype=float)
    _check_cfar_args(mag.shape, pfa, guard, train)
    power = mag.astype(float) ** 2
    total, count = _cfar_window_sums(power, guard, train)
    noise = total / count
    alpha = count * (pfa ** (-1.0 / count) - 1.0)
    return alpha * noise, noise


def cfar_mask(ddm, pfa=1e-3, guard=2, train=8):
    """Boolean map of cells whose power exceeds the CA-CFAR threshold."""
    mag = ddm.magnitude if isinstance(ddm, DelayDopplerMap) else np.asarray(ddm, dtype=float)
    threshold, _ = cfar_threshold(mag, pfa, guard, train)
    return mag.astype(float) ** 2 > threshold


def cfar_detect(ddm, pfa=1e-3, guard=2, train=8, max_targets=None):
    """CFAR exceedances that are also 3x3 local maxima, strongest first."""
    if not isinstance(ddm, DelayDopplerMap):
        # bare magnitude array: chip-grid range axis, no velocity scale
        ddm = DelayDopplerMap(np.asarray(ddm, dtype=float), SPEED_OF_LIGHT * CHIP_TIME / 2.0, np.nan,
                              DopplerConvention.PAPER)
    mag = ddm.magnitude
    threshold, noise = cfar_threshold(ddm, pfa, guard, train)
    power = mag**2
    peaks = ndimage.maximum_filter(_pad_map(mag, 1, -np.inf), size=3, mode="nearest")[1:-1, 1:-1]
    hit = (power > threshold) & (mag >= peaks)
    rows, cols = np.nonzero(hit)
    order = np.lexsort((cols, rows, -mag[rows, cols]))
    if max_targets is not None:
        order = order[: int(max_targets)]
    out = []
    for i in order:
        r, c = int(rows[i]), int(cols[i])
        snr = 10.0 * np.log10(power[r, c] / noise[r, c]) if noise[r, c] > 0 else np.inf
        out.append(Detection(r, c, float(ddm.range_of(r)), float(ddm.velocity_of(c)),
                             float(mag[r, c]), float(snr)))
    return out


def post_processing_snr_db(reflectivity, noise_power, P, n_golay=4 * _BLOCK):
    """Peak-cell SNR of an on-grid target in the delay-Doppler map.

    Golay correlation over ``n_golay`` chips and a unitary P-point DFT give
    ``P * n_golay * |alpha|**2 / sigma**2``.
    """
    return 10.0 * np.log10(P * n_golay * abs(reflectivity) ** 2 / noise_power)


def noise_power_for_snr(snr_db, reflectivity, P, n_golay=4 * _BLOCK):
    return P * n_golay * abs(reflectivity) ** 2 / 10.0 ** (snr_db / 10.0)


class CACFARDetector(BaseEstimator):
    """Two-dimensional cell-averaging CFAR over a delay-Doppler map.

    Parameters
    ----------
    pfa : float
        Design false-alarm probability per cell.
    guard, train : int
        Guard and training cells per side on each axis.
    max_targets : int or None
        Keep at most this many peaks (the ``L`` strongest).
    """

    def __init__(self, pfa=1e-3, guard=2, train=8, max_targets=None):
        self.pfa = pfa
        self.guard = guard
        self.train = train
        self.max_targets = max_targets

    def fit(self, X=None, y=None):
        if X is not None:
            shape = X.shape if not isinstance(X, DelayDopplerMap) else X.magnitude.shape
            _check_cfar_args(shape, self.pfa, self.guard, self.train)
        self.is_fitted_ = True
        return self

    def predict(self, ddm):
        return cfar_detect(ddm, self.pfa, self.guard, self.train, self.max_targets)

    def transform(self, ddm):
        return cfar_mask(ddm, self.pfa, self.guard, self.train)


class PulseDopplerRadar(BaseEstimator, TransformerMixin):
    """Pulse-Doppler processor for a train of 802.11ad preamble echoes.

    ``fit`` checks the pulse geometry; ``transform`` returns the
    delay-Doppler magnitude map ``(n_range_bins, fft_len)`` and ``predict``
    the CFAR detections.

    Parameters
    ----------
    pair_u, pair_v : GolayPair or None
        CEF Golay pairs; default to the standard layout.
    frame_kind : str or FrameKind or None
        Sets the CEF offset to the STF length when whole preambles are
        received; ``None`` means the pulses start with the CEF.
    n_range_bins, fft_len : int or None
        Default to what the pulse width allows and to ``P``.
    T_pr : float or None
        Needed only when fitting on a raw array rather than a PulseTrain.
    """

    def __init__(self, pair_u=None, pair_v=None, frame_kind=None, n_range_bins=None, fft_len=None,
                 T_pr=None, wavelength=WAVELENGTH, doppler_convention="PAPER", pfa=1e-3, guard=2,
                 train=8, max_targets=None):
        self.pair_u = pair_u
        self.pair_v = pair_v
        self.frame_kind = frame_kind
        self.n_range_bins = n_range_bins
        self.fft_len = fft_len
        self.T_pr = T_pr
        self.wavelength = wavelength
        self.doppler_convention = doppler_convention
        self.pfa = pfa
        self.guard = guard
        self.train = train
        self.max_targets = max_targets

    def _pairs(self):
        u, v = standard_cef_pairs()
        return (u if self.pair_u is None else self.pair_u), (v if self.pair_v is None else self.pair_v)

    def fit(self, X, y=None):
        x = _as_pulse_matrix(X)
        self.cef_offset_ = 0 if self.frame_kind is None else FrameKind.parse(self.frame_kind).stf_len
        self.pair_u_, self.pair_v_ = self._pairs()
        if not isinstance(self.pair_u_, GolayPair) or not isinstance(self.pair_v_, GolayPair):
            raise ValueError("pair_u and pair_v must be GolayPair instances")
        n_r = self.n_range_bins
        if n_r is None:
            n_r = x.shape[1] - self.cef_offset_ - CEF_LEN
        if n_r < 1:
            raise ValueError("pulses are too short for the configured frame kind")
        self.n_range_bins_ = int(n_r)
        T_pr = X.T_pr if isinstance(X, PulseTrain) and self.T_pr is None else self.T_pr
        if T_pr is None or T_pr <= 0:
            raise ValueError("T_pr is required to scale the Doppler axis")
        self.T_pr_ = float(T_pr)
        self.chip_time_ = X.chip_time if isinstance(X, PulseTrain) else CHIP_TIME
        self.fft_len_ = x.shape[0] if self.fft_len is None else int(self.fft_len)
        self.n_features_in_ = x.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "n_range_bins_"):
            raise NotFittedError("PulseDopplerRadar is not fitted yet; call fit first")

    def channel_estimates(self, X):
        self._check_fitted()
        return channel_estimates(X, self.pair_u_, self.pair_v_, self.n_range_bins_, self.cef_offset_)

    def delay_doppler_map(self, X):
        h = self.channel_estimates(X)
        return build_ddm(h, self.fft_len_, self.T_pr_, self.wavelength, self.doppler_convention,
                         self.chip_time_)

    def transform(self, X):
        return self.delay_doppler_map(X).magnitude

    def predict(self, X):
        ddm = self.delay_doppler_map(X)
        return cfar_detect(ddm, self.pfa, self.guard, self.train, self.max_targets)


def estimate_targets(pulses, **params):
    """Channel estimation, delay-Doppler map and CFAR in one call."""
    return PulseDopplerRadar(**params).fit(pulses).predict(pulses)
