"""Complex baseband signal containers and numeric primitives.

This module provides the sample container shared by every stage of the simulator,
plus the primitives the other modules are built on: power measurement, Welch
spectral estimation, windowed-sinc fractional delay, receiver noise and band
selection.

Samples are in sqrt-milliwatt, so |s|^2 is instantaneous power in mW and
10*log10(mean |s|^2) is the signal power in dBm.

Typical usage example:
    sig = ComplexSignal(samples, sample_rate_hz=500e6)
    p_dbm = power_dbm(sig, band=(-10e6, 10e6))
    delayed = fractional_delay(sig, 5e-9)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import signal as sp_signal
from survey_assist_utils.logging import get_logger

from utils.app_types import Band, ComplexArray, RealArray

logger = get_logger(__name__, level="INFO")

DEFAULT_SAMPLE_RATE_HZ = 500e6

# Windowed-sinc fractional delay: 129 taps, Kaiser-family window
FRACTIONAL_DELAY_TAPS = 129
KAISER_BETA = 8.0
# Delays closer than this (in samples) to an integer are treated as exact shifts
INTEGER_DELAY_TOL = 1e-9

# Welch defaults give an RBW of ~122 kHz at 500 MS/s
WELCH_SEG_LEN = 4096
WELCH_OVERLAP = 0.5


class WindowKind(str, Enum):
    """Enum for Welch segment windows."""

    HANN = "hann"
    HAMMING = "hamming"
    BLACKMAN_HARRIS = "blackmanharris"
    FLATTOP = "flattop"
    BOXCAR = "boxcar"


@dataclass(frozen=True, eq=False)
class ComplexSignal:
    """Uniformly sampled complex baseband waveform.

    Attributes:
        samples (ComplexArray): Complex samples in sqrt-mW. Stored read-only.
        sample_rate_hz (float): Sample rate in Hz, > 0.
        start_time_s (float): Time of the first sample in seconds, >= 0.
    """

    samples: ComplexArray
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    start_time_s: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        if self.start_time_s < 0:
            raise ValueError(f"start_time_s must be >= 0, got {self.start_time_s}")
        samples = np.array(self.samples, dtype=np.complex128, copy=True).ravel()
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite (no NaN/Inf)")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def dt(self) -> float:
        """Sample period in seconds."""
        return 1.0 / self.sample_rate_hz

    @property
    def duration_s(self) -> float:
        """Record length in seconds."""
        return len(self) / self.sample_rate_hz

    def times(self) -> RealArray:
        """Return the time stamp of every sample in seconds."""
        return self.start_time_s + np.arange(len(self)) / self.sample_rate_hz

    def with_samples(self, samples: ComplexArray) -> ComplexSignal:
        """Return a new signal sharing this signal's rate and start time."""
        return ComplexSignal(samples, self.sample_rate_hz, self.start_time_s)

    def segment(self, start_frac: float) -> ComplexSignal:
        """Return the tail of the record starting at ``start_frac`` of its length.

        Args:
            start_frac (float): Fraction of the record to skip, in [0, 1).

        Returns:
            ComplexSignal: The tail segment with its start time advanced.
        """
        if not 0.0 <= start_frac < 1.0:
            raise ValueError(f"start_frac must be in [0, 1), got {start_frac}")
        first = int(math.floor(start_frac * len(self)))
        return ComplexSignal(
            self.samples[first:],
            self.sample_rate_hz,
            self.start_time_s + first / self.sample_rate_hz,
        )


@dataclass(frozen=True, eq=False)
class PsdEstimate:
    """Two-sided power spectral density estimate.

    Attributes:
        freqs_hz (RealArray): Sorted baseband bin frequencies spanning +-rate/2.
        psd_dbm_per_hz (RealArray): PSD per bin in dBm/Hz.
        rbw_hz (float): Bin spacing (resolution bandwidth) in Hz.
    """

    freqs_hz: RealArray
    psd_dbm_per_hz: RealArray
    rbw_hz: float

    @property
    def psd_mw_per_hz(self) -> RealArray:
        """PSD on a linear scale in mW/Hz."""
        return np.power(10.0, self.psd_dbm_per_hz / 10.0)

    def band_power_mw(self, band: Optional[Band] = None) -> float:
        """Integrate the PSD over the bins whose centre lies in ``band``.

        Args:
            band (Band | None): [f_lo, f_hi] in Hz, None for the full band.

        Returns:
            float: Integrated power in mW.
        """
        psd = self.psd_mw_per_hz
        if band is not None:
            mask = (self.freqs_hz >= band[0]) & (self.freqs_hz <= band[1])
            psd = psd[mask]
        return float(np.sum(psd) * self.rbw_hz)


def mw_to_dbm(power_mw: float) -> float:
    """Convert a power in mW to dBm, returning -inf for zero power."""
    if power_mw <= 0.0:
        return -math.inf
    return 10.0 * math.log10(power_mw)


def dbm_to_mw(power_dbm: float) -> float:
    """Convert a power in dBm to mW (-inf maps to 0)."""
    return 10.0 ** (power_dbm / 10.0)


def validate_band(band: Band, sample_rate_hz: float) -> None:
    """Check that a band is ordered and lies within Nyquist.

    Raises:
        ValueError: "invalid band" if f_lo >= f_hi or the band exceeds +-rate/2.
    """
    f_lo, f_hi = band
    nyquist = sample_rate_hz / 2.0
    if not (-nyquist <= f_lo < f_hi <= nyquist):
        raise ValueError(
            f"invalid band: [{f_lo}, {f_hi}] Hz must be ordered within +-{nyquist} Hz"
        )


def power_dbm(signal: ComplexSignal, band: Optional[Band] = None) -> float:
    """Measure the power of a signal in dBm.

    The full-band variant is 10*log10(mean |s|^2). The banded variant integrates the
    Welch PSD over [f_lo, f_hi].

    Args:
        signal (ComplexSignal): Signal to measure.
        band (Band | None): Optional [f_lo, f_hi] band in Hz.

    Returns:
        float: Power in dBm, -inf for an all-zero signal.

    Raises:
        ValueError: "empty signal" or "invalid band".
    """
    if len(signal) == 0:
        raise ValueError("empty signal")
    if band is None:
        return mw_to_dbm(float(np.mean(np.abs(signal.samples) ** 2)))

    validate_band(band, signal.sample_rate_hz)
    psd = psd_welch(signal, seg_len=min(WELCH_SEG_LEN, len(signal)))
    return mw_to_dbm(psd.band_power_mw(band))


def psd_welch(
    signal: ComplexSignal,
    seg_len: int = WELCH_SEG_LEN,
    overlap_frac: float = WELCH_OVERLAP,
    window: WindowKind | str = WindowKind.HANN,
) -> PsdEstimate:
    """Averaged-periodogram (Welch) PSD estimate of a complex signal.

    The density scaling normalises by the window power, so integrating the PSD over
    all bins returns the mean signal power (Parseval). No detrending is applied: a
    DC term (LO leakage) is part of the signal.

    Args:
        signal (ComplexSignal): Signal to analyse.
        seg_len (int): Segment length; bin spacing is rate / seg_len.
        overlap_frac (float): Segment overlap in [0, 1).
        window (WindowKind | str): Segment window.

    Returns:
        PsdEstimate: Two-sided PSD sorted by frequency.

    Raises:
        ValueError: If seg_len exceeds the signal length or overlap is out of range.
    """
    if seg_len < 1 or seg_len > len(signal):
        raise ValueError(
            f"seg_len {seg_len} must be between 1 and the signal length {len(signal)}"
        )
    if not 0.0 <= overlap_frac < 1.0:
        raise ValueError(f"overlap_frac must be in [0, 1), got {overlap_frac}")

    freqs, psd = sp_signal.welch(
        signal.samples,
        fs=signal.sample_rate_hz,
        window=WindowKind(window).value,
        nperseg=seg_len,
        noverlap=int(seg_len * overlap_frac),
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    freqs = np.fft.fftshift(freqs)
    psd = np.fft.fftshift(psd)
    with np.errstate(divide="ignore"):
        psd_dbm = 10.0 * np.log10(psd)
    return PsdEstimate(
        freqs_hz=freqs,
        psd_dbm_per_hz=psd_dbm,
        rbw_hz=signal.sample_rate_hz / seg_len,
    )


def _kaiser(t: RealArray, half_width: float, beta: float) -> RealArray:
    """Continuous Kaiser window evaluated at (possibly fractional) offsets ``t``."""
    ratio = np.clip(t / half_width, -1.0, 1.0)
    return np.i0(beta * np.sqrt(1.0 - ratio**2)) / np.i0(beta)


def fractional_delay_kernel(frac: float) -> RealArray:
    """Windowed-sinc interpolation kernel for a fractional delay in [0, 1).

    Kernel index j (0..128) corresponds to an integer offset j - 64 and holds
    sinc(offset - frac) * kaiser(offset - frac).
    """
    half = FRACTIONAL_DELAY_TAPS // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64) - frac
    return np.sinc(offsets) * _kaiser(offsets, half + 1.0, KAISER_BETA)


def fractional_delay(signal: ComplexSignal, delay_s: float) -> ComplexSignal:
    """Delay a signal by an arbitrary (non-integer-sample) amount.

    Integer-sample delays are exact shifts. Other delays use a 129-tap
    windowed-sinc interpolator. The output has the input's length: the leading
    ``delay`` samples see zeros before the record and the tail is truncated. Only the
    interior (one filter length away from either end) is free of edge transients.

    Args:
        signal (ComplexSignal): Signal to delay.
        delay_s (float): Delay in seconds, >= 0.

    Returns:
        ComplexSignal: Delayed copy, same length, rate and start time.

    Raises:
        ValueError: "non-causal delay" for a negative delay, or a delay longer than
            the record.
    """
    if delay_s < 0:
        raise ValueError(f"non-causal delay: {delay_s} s")
    n = len(signal)
    delay_samples = delay_s * signal.sample_rate_hz
    if delay_samples > n:
        raise ValueError(
            f"delay of {delay_samples:.2f} samples exceeds the signal length {n}"
        )

    nearest = round(delay_samples)
    out = np.zeros(n, dtype=np.complex128)
    if abs(delay_samples - nearest) < INTEGER_DELAY_TOL:
        if nearest < n:
            out[nearest:] = signal.samples[: n - nearest]
        return signal.with_samples(out)

    whole = int(math.floor(delay_samples))
    kernel = fractional_delay_kernel(delay_samples - whole)
    full = sp_signal.oaconvolve(signal.samples, kernel)

    # out[m] = full[m - whole + half]
    half = FRACTIONAL_DELAY_TAPS // 2
    first = half - whole
    if first >= 0:
        out[:] = full[first : first + n]
    else:
        out[-first:] = full[: n + first]
    return signal.with_samples(out)


def band_limited_noise_floor(
    signal: ComplexSignal, floor_dbm: Optional[float], rng_seed: int
) -> ComplexSignal:
    """Add circularly symmetric white complex Gaussian noise to a signal.

    Args:
        signal (ComplexSignal): Signal to add noise to.
        floor_dbm (float | None): Total full-band noise power in dBm. None or -inf
            disables the noise.
        rng_seed (int): Seed for the noise generator.

    Returns:
        ComplexSignal: Noisy copy, deterministic per seed.
    """
    if floor_dbm is None or (math.isinf(floor_dbm) and floor_dbm < 0):
        return signal
    if not math.isfinite(floor_dbm):
        raise ValueError(f"floor_dbm must be finite, got {floor_dbm}")

    rng = np.random.default_rng(rng_seed)
    scale = math.sqrt(dbm_to_mw(floor_dbm) / 2.0)
    noise = scale * (
        rng.standard_normal(len(signal)) + 1j * rng.standard_normal(len(signal))
    )
    return signal.with_samples(signal.samples + noise)


def band_filter(signal: ComplexSignal, band: Band) -> ComplexSignal:
    """Keep only the spectral content of ``band`` (FFT brick-wall selection).

    Args:
        signal (ComplexSignal): Signal to filter.
        band (Band): [f_lo, f_hi] in Hz.

    Returns:
        ComplexSignal: Band-selected copy.
    """
    validate_band(band, signal.sample_rate_hz)
    spectrum = np.fft.fft(signal.samples)
    freqs = np.fft.fftfreq(len(signal), d=signal.dt)
    spectrum[(freqs < band[0]) | (freqs > band[1])] = 0.0
    return signal.with_samples(np.fft.ifft(spectrum))
