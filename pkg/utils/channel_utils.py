"""Multipath self-interference channel: presets, propagation and frequency response.

The channel output is y = sum_k c_k(t) * x(t - d_k) + n(t), where the tap coefficient
c_k(t) = 10^(g_k(t)/20) * exp(j*phi_k(t)) * exp(-j*2*pi*f_c*d_k) follows the
disturbance schedule: steps hold the new value from the event time, ramps move gain
(in dB) and phase linearly over the ramp duration.
"""

import math

import numpy as np
from survey_assist_utils.logging import get_logger

from models.channel import (
    ChannelPreset,
    ChannelTap,
    DisturbanceKind,
    SiChannel,
)
from utils.app_types import ComplexArray, RealArray
from utils.signal_utils import ComplexSignal, band_limited_noise_floor, fractional_delay

logger = get_logger(__name__, level="INFO")

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Intrinsic delay of the components and transmission lines on the canceller board
BOARD_DELAY_S = 3e-9
PRESET_NOISE_FLOOR_DBM = -90.0


def free_space_loss_db(distance_m: float, carrier_hz: float) -> float:
    """Friis free-space path loss 20*log10(4*pi*d/lambda) in dB."""
    wavelength = SPEED_OF_LIGHT_M_S / carrier_hz
    return 20.0 * math.log10(4.0 * math.pi * distance_m / wavelength)


def preset(kind: ChannelPreset | str) -> SiChannel:
    """Return one of the bundled channel configurations.

    Both presets include the board delay so the dominant paths sit near the canceller
    delay span.

    Args:
        kind (ChannelPreset | str): "circulator" (shared antenna) or "dual_antenna".

    Returns:
        SiChannel: The preset channel with a -90 dBm noise floor.
    """
    kind = ChannelPreset(kind)
    if kind == ChannelPreset.CIRCULATOR:
        taps = [
            ChannelTap(delay_s=0.5e-9, gain_db=-23.5, phase_rad=0.0, label="direct leakage"),
            ChannelTap(
                delay_s=2.0e-9, gain_db=-20.0, phase_rad=math.pi / 3, label="antenna reflection"
            ),
            ChannelTap(
                delay_s=12e-9, gain_db=-45.0, phase_rad=math.pi, label="environment reflection"
            ),
        ]
    else:
        taps = [
            ChannelTap(delay_s=1.0e-9, gain_db=-29.6, phase_rad=0.0, label="line of sight"),
            ChannelTap(delay_s=12e-9, gain_db=-50.0, phase_rad=math.pi, label="reflection"),
        ]

    offset_taps = [
        tap.model_copy(update={"delay_s": tap.delay_s + BOARD_DELAY_S}) for tap in taps
    ]
    return SiChannel(taps=offset_taps, noise_floor_dbm=PRESET_NOISE_FLOOR_DBM)


def tap_gain(ch: SiChannel, tap_index: int, times_s: RealArray) -> ComplexArray:
    """Baseband-equivalent complex coefficient of one tap at the given times.

    Args:
        ch (SiChannel): Channel.
        tap_index (int): Tap to evaluate.
        times_s (RealArray): Evaluation times in seconds.

    Returns:
        ComplexArray: Coefficient per time stamp.
    """
    tap = ch.taps[tap_index]
    times_s = np.asarray(times_s, dtype=np.float64)
    gain_db = np.full(times_s.shape, tap.gain_db)
    phase = np.full(times_s.shape, tap.phase_rad)
    current_gain, current_phase = tap.gain_db, tap.phase_rad

    for event in ch.events:
        if event.tap_index != tap_index:
            continue
        if event.kind == DisturbanceKind.STEP:
            after = times_s >= event.time_s
        else:
            duration = float(event.ramp_duration_s or 0.0)
            ramp = (times_s >= event.time_s) & (times_s < event.time_s + duration)
            frac = (times_s[ramp] - event.time_s) / duration
            gain_db[ramp] = current_gain + frac * (event.new_gain_db - current_gain)
            phase[ramp] = current_phase + frac * (event.new_phase_rad - current_phase)
            after = times_s >= event.time_s + duration
        gain_db[after] = event.new_gain_db
        phase[after] = event.new_phase_rad
        current_gain, current_phase = event.new_gain_db, event.new_phase_rad

    carrier_rotation = np.exp(-2j * np.pi * ch.carrier_hz * tap.delay_s)
    return np.power(10.0, gain_db / 20.0) * np.exp(1j * phase) * carrier_rotation


def tap_schedule(ch: SiChannel, times_s: RealArray) -> ComplexArray:
    """Complex coefficient of every tap over time, shape (n_taps, len(times_s))."""
    return np.stack([tap_gain(ch, k, times_s) for k in range(len(ch.taps))])


def tap_coefficients(ch: SiChannel, t: float = 0.0) -> ComplexArray:
    """Complex coefficient of every tap at time ``t``."""
    return tap_schedule(ch, np.array([t], dtype=np.float64))[:, 0]


def propagate(ch: SiChannel, x: ComplexSignal, rng_seed: int) -> ComplexSignal:
    """Pass the PA output through the SI coupling channel.

    Args:
        ch (SiChannel): Channel.
        x (ComplexSignal): PA output.
        rng_seed (int): Seed for the receiver noise.

    Returns:
        ComplexSignal: SI signal at the receiver input.

    Raises:
        ValueError: If a tap delay exceeds the signal duration.
    """
    max_delay = max(tap.delay_s for tap in ch.taps)
    if max_delay > x.duration_s:
        raise ValueError(
            f"tap delay {max_delay} s exceeds signal duration {x.duration_s} s"
        )

    times = x.times()
    static = tap_coefficients(ch, x.start_time_s)
    y = np.zeros(len(x), dtype=np.complex128)
    for k, tap in enumerate(ch.taps):
        delayed = fractional_delay(x, tap.delay_s).samples
        event_times = [event.time_s for event in ch.events if event.tap_index == k]
        # samples before the tap's first event take exactly the no-event path
        split = int(np.searchsorted(times, min(event_times))) if event_times else len(x)
        y[:split] += static[k] * delayed[:split]
        if split < len(x):
            y[split:] += tap_gain(ch, k, times[split:]) * delayed[split:]

    logger.debug(
        f"propagated {len(x)} samples through {len(ch.taps)} taps, "
        f"{len(ch.events)} events, noise_floor_dbm={ch.noise_floor_dbm}"
    )
    return band_limited_noise_floor(x.with_samples(y), ch.noise_floor_dbm, rng_seed)


def frequency_response(ch: SiChannel, freqs_hz: RealArray, t: float = 0.0) -> ComplexArray:
    """Baseband frequency response H(f, t) = sum_k c_k(t) * exp(-j*2*pi*f*d_k).

    Args:
        ch (SiChannel): Channel.
        freqs_hz (RealArray): Baseband frequencies in Hz.
        t (float): Evaluation time in seconds.

    Returns:
        ComplexArray: Complex response per frequency.
    """
    freqs_hz = np.asarray(freqs_hz, dtype=np.float64)
    coefficients = tap_coefficients(ch, t)
    response = np.zeros(freqs_hz.shape, dtype=np.complex128)
    for coefficient, tap in zip(coefficients, ch.taps, strict=True):
        response += coefficient * np.exp(-2j * np.pi * freqs_hz * tap.delay_s)
    return response
