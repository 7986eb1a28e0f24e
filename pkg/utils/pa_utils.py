"""Memoryless power-amplifier model and its two-tone (IMD3) oracle.

The PA is the odd-order complex-baseband polynomial
y = g * (x + a3*x*|x|^2 + a5*x*|x|^4), i.e. an AM/AM + AM/PM nonlinearity with no
absolute-phase dependence. For a two-tone drive of per-tone amplitude A the
expansion is closed-form:

    main tone = A * (1 + 3*a3*A^2 + 10*a5*A^4)
    IMD3 tone = A^3 * (a3 + 5*a5*A^2)

which ``imd3_dbc`` evaluates and ``measure_imd3_dbc`` checks against a PSD.
"""

import math

import numpy as np
from survey_assist_utils.logging import get_logger

from models.pa import PaParams
from utils.signal_utils import ComplexSignal, dbm_to_mw, mw_to_dbm, psd_welch

logger = get_logger(__name__, level="INFO")

# PSD bins either side of a tone integrated as "the tone"
TONE_HALF_WIDTH_BINS = 6
TWO_TONE_SEG_LEN = 16384


def amplify(x: ComplexSignal, p: PaParams) -> ComplexSignal:
    """Pass a signal through the PA.

    Args:
        x (ComplexSignal): PA input.
        p (PaParams): PA parameters.

    Returns:
        ComplexSignal: PA output, including LO leakage if enabled.
    """
    gain = 10.0 ** (p.gain_db / 20.0)
    power = np.abs(x.samples) ** 2
    y = gain * x.samples * (1.0 + p.a3.value * power + p.a5.value * power**2)

    if p.lo_leakage_dbc is not None and len(x) > 0:
        signal_mw = float(np.mean(np.abs(y) ** 2))
        leakage = math.sqrt(signal_mw * 10.0 ** (p.lo_leakage_dbc / 10.0))
        y = y + leakage
    return x.with_samples(y)


def imd3_dbc(p: PaParams, per_tone_input_dbm: float) -> float:
    """Closed-form IMD3 level of a two-tone drive, relative to one main tone.

    Args:
        p (PaParams): PA parameters.
        per_tone_input_dbm (float): Input power of each tone in dBm.

    Returns:
        float: IMD3 in dBc, -inf when the PA has no odd-order terms.
    """
    a_sq = dbm_to_mw(per_tone_input_dbm)
    a3 = p.a3.value
    a5 = p.a5.value
    if a5 != 0 and abs(a5) * a_sq**2 >= 0.1 * abs(a3) * a_sq:
        logger.warning(
            f"IMD3 oracle outside the cubic-dominant regime at {per_tone_input_dbm} dBm per tone"
        )

    imd = abs(a3 * a_sq + 5.0 * a5 * a_sq**2)
    main = abs(1.0 + 3.0 * a3 * a_sq + 10.0 * a5 * a_sq**2)
    if imd == 0.0:
        return -math.inf
    return 20.0 * math.log10(imd / main)


def compression_point_dbm(p: PaParams) -> float:
    """Input power (constant envelope) at which the gain drops by 1 dB.

    Only the third-order term is considered.
    """
    a3 = abs(p.a3.value)
    if a3 == 0.0:
        return math.inf
    return mw_to_dbm((1.0 - 10.0 ** (-1.0 / 20.0)) / a3)


def measure_imd3_dbc(
    signal: ComplexSignal,
    tone_spacing_hz: float,
    center_hz: float = 0.0,
    seg_len: int = TWO_TONE_SEG_LEN,
) -> tuple[float, float]:
    """Measure main-tone and IMD3 levels of a two-tone signal from its PSD.

    Args:
        signal (ComplexSignal): Two-tone (PA output) signal.
        tone_spacing_hz (float): Spacing of the two main tones.
        center_hz (float): Centre of the tone pair.
        seg_len (int): Welch segment length.

    Returns:
        tuple[float, float]: (upper main tone power in dBm, worst IMD3 in dBc).
    """
    psd = psd_welch(signal, seg_len=min(seg_len, len(signal)))
    half_width = TONE_HALF_WIDTH_BINS * psd.rbw_hz

    def tone_mw(freq_hz: float) -> float:
        return psd.band_power_mw((freq_hz - half_width, freq_hz + half_width))

    half = tone_spacing_hz / 2.0
    main_hi = tone_mw(center_hz + half)
    main_lo = tone_mw(center_hz - half)
    imd_hi = tone_mw(center_hz + 3.0 * half)
    imd_lo = tone_mw(center_hz - 3.0 * half)
    worst = max(mw_to_dbm(imd_hi) - mw_to_dbm(main_hi), mw_to_dbm(imd_lo) - mw_to_dbm(main_lo))
    return mw_to_dbm(main_hi), worst
