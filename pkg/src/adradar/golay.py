"""Golay complementary pairs, 802.11ad CPHY/SCPHY preambles and RRC shaping.

The radar reuses the channel estimation field (CEF) of the 802.11ad
preamble.  A CEF carries two 512-chip blocks ``Gu`` and ``Gv``, each the
concatenation of a 256-chip complementary pair, so the sum of the matched
filter outputs of a pair collapses to a scaled delta.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .constants import CEF_LEN, CHIP_RATE, GOLAY_BLOCK

# Delay/weight vectors of the 802.11ad Ga128/Gb128 recursion.
STANDARD_DELAYS_128 = (1, 8, 2, 4, 16, 32, 64)
STANDARD_WEIGHTS_128 = (-1, -1, -1, -1, 1, -1, -1)


def _frozen(x, dtype):
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _is_pow2(n):
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GolayPair:
    """Bipolar complementary pair ``(a, b)`` of power-of-two length."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen(self.a, np.int64)
        b = _frozen(self.b, np.int64)
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError("Golay pair sequences must be 1-D with equal length")
        if not _is_pow2(len(a)):
            raise ValueError(f"Golay pair length must be a power of two, got {len(a)}")
        if not (np.all(np.abs(a) == 1) and np.all(np.abs(b) == 1)):
            raise ValueError("Golay pair entries must be +1/-1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self):
        return len(self.a)

    def __eq__(self, other):
        if not isinstance(other, GolayPair):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __hash__(self):
        return hash((self.a.tobytes(), self.b.tobytes()))


@dataclass(frozen=True)
class ChipSequence:
    """Complex baseband samples at ``chip_rate`` (Hz)."""

    samples: np.ndarray
    chip_rate: float = CHIP_RATE

    def __post_init__(self):
        s = _frozen(self.samples, np.complex128)
        if s.ndim != 1 or len(s) == 0:
            raise ValueError("chip sequence must be a non-empty 1-D array")
        if self.chip_rate <= 0:
            raise ValueError("chip_rate must be positive")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.chip_rate


class FrameKind(enum.Enum):
    """802.11ad frame formats usable as radar pulses: (stf_len, cef_len) in chips."""

    CPHY = (6400, CEF_LEN)
    SCPHY = (2176, CEF_LEN)

    @property
    def stf_len(self):
        return self.value[0]

    @property
    def cef_len(self):
        return self.value[1]

    @property
    def preamble_len(self):
        return self.stf_len + self.cef_len

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown frame kind {name!r}; expected CPHY or SCPHY") from None


@dataclass(frozen=True)
class ShapingFilter:
    taps: np.ndarray
    rolloff: float
    oversample: int
    span: int

    def __post_init__(self):
        object.__setattr__(self, "taps", _frozen(self.taps, np.float64))


def generate_golay_pair(n, delays=None, weights=None):
    """Build a complementary pair by the standard delay/weight recursion.

    ``a_k = a_{k-1} + w_k z^{d_k} b_{k-1}``, ``b_k = a_{k-1} - w_k z^{d_k} b_{k-1}``
    starting from ``a_0 = b_0 = [1]``.

    Parameters
    ----------
    n : int
        Sequence length ``2**k``.
    delays : sequence of int, optional
        A permutation of ``{1, 2, ..., 2**(k-1)}``. Defaults to the 802.11ad
        vector when ``n == 128`` and to ascending powers of two otherwise.
    weights : sequence of int, optional
        ``k`` entries of +1/-1. Defaults likewise.
    """
    if not _is_pow2(n):
        raise ValueError(f"n must be a power of two, got {n!r}")
    k = int(n).bit_length() - 1
    if delays is None and weights is None and n == 128:
        delays, weights = STANDARD_DELAYS_128, STANDARD_WEIGHTS_128
    if delays is None:
        delays = [2**i for i in range(k)]
    if weights is None:
        weights = [1] * k
    delays = [int(d) for d in delays]
    weights = [int(w) for w in weights]
    if len(delays) != k or len(weights) != k:
        raise ValueError(f"need {k} delays and {k} weights for n={n}")
    if sorted(delays) != [2**i for i in range(k)]:
        raise ValueError(f"delays must be a permutation of powers of two below {n}")
    if any(w not in (1, -1) for w in weights):
        raise ValueError("weights must be +1 or -1")

    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[0] = b[0] = 1
    length = 1
    for d, w in zip(delays, weights):
        new_len = length + d
        na = np.zeros(n, dtype=np.int64)
        nb = np.zeros(n, dtype=np.int64)
        na[:length] += a[:length]
        nb[:length] += a[:length]
        na[d : d + length] += w * b[:length]
        nb[d : d + length] -= w * b[:length]
        a, b, length = na, nb, new_len
    return GolayPair(a, b)


def autocorrelation_sum(pair):
    """Aperiodic ``R_a + R_b`` over lags ``-(N-1)..N-1`` (integer arithmetic)."""
    a, b = pair.a, pair.b
    return np.correlate(a, a, "full") + np.correlate(b, b, "full")


def standard_cef_pairs(base=None):
    """Return the 256-chip pairs ``(u, v)`` laid out as in the 802.11ad CEF.

    ``Gu512 = [-Gb, -Ga, Gb, -Ga]`` and ``Gv512 = [-Gb, Ga, -Gb, -Ga]`` in
    128-chip blocks of ``base``.
    """
    if base is None:
        base = generate_golay_pair(GOLAY_BLOCK)
    if len(base) != GOLAY_BLOCK:
        raise ValueError(f"base pair must have length {GOLAY_BLOCK}")
    ga, gb = base.a, base.b
    u = GolayPair(np.r_[-gb, -ga], np.r_[gb, -ga])
    v = GolayPair(np.r_[-gb, ga], np.r_[-gb, -ga])
    return u, v


def build_cef(pair_u, pair_v):
    """Assemble the 1152-chip CEF ``Gu512 | Gv512 | guard``.

    The 128-chip trailing guard repeats the leading block of ``Gbv_256``.
    """
    for name, p in (("pair_u", pair_u), ("pair_v", pair_v)):
        if len(p) != 256:
            raise ValueError(f"{name} must hold 256-chip sequences, got {len(p)}")
    gu = np.r_[pair_u.a, pair_u.b]
    gv = np.r_[pair_v.a, pair_v.b]
    guard = pair_v.b[:GOLAY_BLOCK]
    return ChipSequence(np.r_[gu, gv, guard].astype(np.complex128))


def cef_reference(pair_u, pair_v):
    """The 1024 Golay chips of the CEF that the receiver correlates against."""
    return np.r_[pair_u.a, pair_u.b, pair_v.a, pair_v.b].astype(np.float64)


def build_stf(kind, base=None):
    # Repeated Ga128 with a sign-flipped terminal block.
    kind = FrameKind.parse(kind)
    if base is None:
        base = generate_golay_pair(GOLAY_BLOCK)
    n_blocks = kind.stf_len // GOLAY_BLOCK
    stf = np.tile(base.a, n_blocks)
    stf[-GOLAY_BLOCK:] *= -1
    return stf


def build_preamble(kind, cef, base=None):
    """STF followed by ``cef``; returns a ChipSequence of ``kind.preamble_len`` chips."""
    kind = FrameKind.parse(kind)
    if len(cef) != CEF_LEN:
        raise ValueError(f"CEF must have {CEF_LEN} chips, got {len(cef)}")
    stf = build_stf(kind, base)
    return ChipSequence(np.r_[stf.astype(np.complex128), cef.samples], cef.chip_rate)


def default_preamble(kind):
    """Preamble with the default Golay pairs, plus those pairs for the receiver."""
    u, v = standard_cef_pairs()
    return build_preamble(kind, build_cef(u, v)), u, v


def _rrc_impulse(t, beta):
    # t in symbol periods; unit-symbol-period RRC
    t = np.asarray(t, dtype=float)
    h = np.empty_like(t)
    at_zero = np.isclose(t, 0.0)
    at_sing = np.isclose(np.abs(t), 1.0 / (4.0 * beta))
    regular = ~(at_zero | at_sing)
    tr = t[regular]
    num = np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta))
    den = np.pi * tr * (1 - (4 * beta * tr) ** 2)
    h[regular] = num / den
    h[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    h[at_sing] = (beta / np.sqrt(2.0)) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
    )
    return h


def design_rrc(rolloff=0.25, oversample=4, span=16):
    """Root-raised-cosine taps with unit energy spanning ``span`` symbols."""
    if not 0.0 < rolloff <= 1.0:
        raise ValueError(f"rolloff must lie in (0, 1], got {rolloff}")
    if int(oversample) != oversample or oversample < 2:
        raise ValueError(f"oversample must be an integer >= 2, got {oversample}")
    if int(span) != span or span < 8:
        raise ValueError(f"span must be an integer >= 8 symbols, got {span}")
    oversample, span = int(oversample), int(span)
    half = span * oversample // 2
    t = np.arange(-half, half + 1) / oversample
    taps = _rrc_impulse(t, rolloff)
    taps /= np.sqrt(np.sum(taps**2))
    return ShapingFilter(taps, float(rolloff), oversample, span)


def shape(seq, filt):
    """Upsample ``seq`` by ``filt.oversample`` and convolve with the taps."""
    samples = seq.samples if isinstance(seq, ChipSequence) else np.asarray(seq, dtype=complex)
    if samples.size == 0:
        raise ValueError("cannot shape an empty sequence")
    up = np.zeros(len(samples) * filt.oversample, dtype=np.complex128)
    up[:: filt.oversample] = samples
    rate = seq.chip_rate * filt.oversample if isinstance(seq, ChipSequence) else CHIP_RATE * filt.oversample
    return ChipSequence(np.convolve(up, filt.taps), rate)


def matched_filter(shaped, filt, n_chips):
    """Receive RRC followed by chip-rate decimation; returns ``n_chips`` samples."""
    samples = shaped.samples if isinstance(shaped, ChipSequence) else np.asarray(shaped)
    y = np.convolve(samples, filt.taps)
    delay = len(filt.taps) - 1
    idx = delay + filt.oversample * np.arange(n_chips)
    if idx[-1] >= len(y):
        raise ValueError("shaped signal too short for the requested chip count")
    return y[idx]


def write_chips_csv(path, seq):
    """Dump samples as ``re,im`` rows (debug aid)."""
    samples = seq.samples if isinstance(seq, ChipSequence) else np.asarray(seq, dtype=complex)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im"])
        for z in samples:
            w.writerow([repr(float(z.real)), repr(float(z.imag))])
