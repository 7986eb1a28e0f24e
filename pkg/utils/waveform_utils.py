"""Transmit and signal-of-interest waveform generation.

Band-limited carriers are white complex Gaussian noise shaped in the frequency
domain: a brick-wall mask with a raised-cosine roll-off occupying the outer 2% of the
bandwidth, so nothing is left outside the nominal band. Two-tone stimuli are two
equal-amplitude complex tones at +-spacing/2.
"""

import math

import numpy as np
from survey_assist_utils.logging import get_logger

from models.waveform import WaveformKind, WaveformSpec
from utils.app_types import RealArray
from utils.signal_utils import ComplexSignal, dbm_to_mw

logger = get_logger(__name__, level="INFO")

ROLLOFF_FRAC = 0.02
# SoI bandwidth relative to the SI waveform when a scenario leaves it unset
SOI_BANDWIDTH_RATIO = 0.1


def shaping_mask(freqs_hz: RealArray, center_hz: float, bandwidth_hz: float) -> RealArray:
    """Amplitude mask: flat to (1 - rolloff)*BW/2, raised cosine down to zero at BW/2."""
    edge = bandwidth_hz / 2.0
    transition = ROLLOFF_FRAC * bandwidth_hz
    flat = edge - transition
    offset = np.abs(freqs_hz - center_hz)

    mask = np.zeros_like(freqs_hz)
    mask[offset <= flat] = 1.0
    ramp = (offset > flat) & (offset < edge)
    mask[ramp] = 0.5 * (1.0 + np.cos(np.pi * (offset[ramp] - flat) / transition))
    return mask


def generate(spec: WaveformSpec, sample_rate_hz: float) -> ComplexSignal:
    """Generate a test waveform.

    Args:
        spec (WaveformSpec): Waveform description.
        sample_rate_hz (float): Sample rate in Hz.

    Returns:
        ComplexSignal: Waveform normalised to ``spec.power_dbm``, deterministic per
            seed.

    Raises:
        ValueError: If the waveform does not fit inside the sampled band.
    """
    f_lo, f_hi = spec.occupied_band()
    if spec.kind != WaveformKind.TWO_TONE and (spec.bandwidth_hz or 0.0) >= sample_rate_hz:
        raise ValueError(
            f"bandwidth {spec.bandwidth_hz} Hz must be below the sample rate {sample_rate_hz} Hz"
        )
    if max(abs(f_lo), abs(f_hi)) > sample_rate_hz / 2.0:
        raise ValueError(
            f"waveform band [{f_lo}, {f_hi}] Hz does not fit within +-{sample_rate_hz / 2.0} Hz"
        )

    n_samples = int(round(spec.duration_s * sample_rate_hz))
    if n_samples < 1:
        raise ValueError(f"duration {spec.duration_s} s yields no samples")
    target_mw = dbm_to_mw(spec.power_dbm)

    if spec.kind == WaveformKind.TWO_TONE:
        t = np.arange(n_samples) / sample_rate_hz
        half = float(spec.tone_spacing_hz or 0.0) / 2.0
        amplitude = math.sqrt(target_mw / 2.0)
        samples = amplitude * (
            np.exp(2j * np.pi * (spec.center_hz + half) * t)
            + np.exp(2j * np.pi * (spec.center_hz - half) * t)
        )
        logger.debug(f"two-tone waveform spacing={spec.tone_spacing_hz} n={n_samples}")
        return ComplexSignal(samples, sample_rate_hz)

    rng = np.random.default_rng(spec.seed)
    white = rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)
    freqs = np.fft.fftfreq(n_samples, d=1.0 / sample_rate_hz)
    shaped = np.fft.ifft(
        np.fft.fft(white) * shaping_mask(freqs, spec.center_hz, float(spec.bandwidth_hz or 0.0))
    )
    measured_mw = float(np.mean(np.abs(shaped) ** 2))
    if measured_mw <= 0.0:
        raise ValueError("bandwidth too narrow for the record length: no spectral content")
    samples = shaped * math.sqrt(target_mw / measured_mw)

    logger.debug(
        f"{spec.kind.value} waveform bw={spec.bandwidth_hz} power_dbm={spec.power_dbm} "
        f"seed={spec.seed} n={n_samples}"
    )
    return ComplexSignal(samples, sample_rate_hz)
