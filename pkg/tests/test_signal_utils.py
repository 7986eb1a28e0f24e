"""Unit tests for the complex signal container and numeric primitives."""

# ruff: noqa: PLR2004
# pylint: disable=redefined-outer-name, unused-argument

import math

import numpy as np
import pytest

from utils.signal_utils import (
    FRACTIONAL_DELAY_TAPS,
    ComplexSignal,
    band_filter,
    band_limited_noise_floor,
    fractional_delay,
    power_dbm,
    psd_welch,
)

RATE = 500e6


@pytest.mark.utils
def test_complex_signal_rejects_invalid_inputs():
    """Non-finite samples and non-positive rates are rejected."""
    with pytest.raises(ValueError, match="finite"):
        ComplexSignal(np.array([1.0, np.nan]), RATE)
    with pytest.raises(ValueError, match="sample_rate_hz"):
        ComplexSignal(np.ones(4), 0.0)


@pytest.mark.utils
def test_complex_signal_is_read_only():
    """Samples cannot be modified in place after construction."""
    sig = ComplexSignal(np.ones(4), RATE)
    with pytest.raises(ValueError):
        sig.samples[0] = 2.0


@pytest.mark.utils
def test_segment_advances_start_time():
    """The steady-state tail keeps the rate and moves the start time."""
    sig = ComplexSignal(np.arange(10, dtype=float), RATE)
    tail = sig.segment(0.5)
    assert len(tail) == 5
    assert tail.samples[0] == 5.0
    assert tail.start_time_s == pytest.approx(5 / RATE)


@pytest.mark.utils
def test_power_dbm_of_unit_power_signal_is_zero():
    """A constant 1 mW envelope measures 0 dBm."""
    sig = ComplexSignal(np.exp(1j * np.linspace(0, 3, 1000)), RATE)
    assert power_dbm(sig) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.utils
def test_power_dbm_errors():
    """Empty signals and invalid bands raise."""
    with pytest.raises(ValueError, match="empty signal"):
        power_dbm(ComplexSignal(np.array([], dtype=complex), RATE))
    sig = ComplexSignal(np.ones(8192), RATE)
    with pytest.raises(ValueError, match="invalid band"):
        power_dbm(sig, (10e6, 5e6))
    with pytest.raises(ValueError, match="invalid band"):
        power_dbm(sig, (0.0, 300e6))


@pytest.mark.utils
def test_all_zero_signal_is_minus_infinity():
    """Zero power maps to -inf dBm."""
    assert power_dbm(ComplexSignal(np.zeros(16), RATE)) == -math.inf


@pytest.mark.utils
def test_power_dbm_ignores_a_global_phase(noise_signal):
    """Rotating every sample by the same phase changes no power reading."""
    sig = noise_signal(duration_s=1e-4)
    rotated = sig.with_samples(np.exp(0.9j) * sig.samples)
    assert power_dbm(rotated) == pytest.approx(power_dbm(sig), abs=1e-9)
    assert power_dbm(rotated, (-5e6, 5e6)) == pytest.approx(power_dbm(sig, (-5e6, 5e6)), abs=1e-9)


@pytest.mark.utils
def test_psd_parseval(noise_signal):
    """Integrating the Welch PSD over all bins returns the signal power."""
    sig = noise_signal(bandwidth_hz=100e6, duration_s=4e-4, power_dbm=3.0)
    psd = psd_welch(sig)
    integrated = 10.0 * math.log10(psd.band_power_mw())
    assert integrated == pytest.approx(power_dbm(sig), abs=0.5)
    assert psd.rbw_hz == pytest.approx(RATE / 4096)
    assert np.all(np.diff(psd.freqs_hz) > 0)


@pytest.mark.utils
def test_psd_scales_by_exactly_the_gain(noise_signal):
    """Scaling the signal by g moves every bin by 20*log10(g) dB."""
    sig = noise_signal(duration_s=1e-4)
    gain = 0.25
    base = psd_welch(sig)
    scaled = psd_welch(sig.with_samples(gain * sig.samples))
    finite = np.isfinite(base.psd_dbm_per_hz)
    shift = scaled.psd_dbm_per_hz[finite] - base.psd_dbm_per_hz[finite]
    assert finite.sum() > 0.9 * finite.size
    assert np.allclose(shift, 20 * math.log10(gain), rtol=0.0, atol=1e-9)


@pytest.mark.utils
def test_psd_peak_bin_holds_the_tone(tone):
    """The strongest Welch bin is the one containing the tone frequency."""
    freq = 10.3e6
    psd = psd_welch(tone(freq, 40_000))
    peak = psd.freqs_hz[int(np.argmax(psd.psd_dbm_per_hz))]
    assert abs(peak - freq) <= psd.rbw_hz / 2


@pytest.mark.utils
def test_banded_power_selects_the_tone(tone):
    """Band power captures a tone inside the band and rejects it outside."""
    sig = tone(10e6, 200_000)
    assert power_dbm(sig, (5e6, 15e6)) == pytest.approx(0.0, abs=0.1)
    assert power_dbm(sig, (-15e6, -5e6)) < -60.0


@pytest.mark.utils
def test_integer_delay_is_an_exact_shift(noise_signal):
    """A delay of a whole number of samples shifts the samples exactly."""
    sig = noise_signal(duration_s=2e-5)
    delayed = fractional_delay(sig, 8e-9)  # 4 samples
    assert np.array_equal(delayed.samples[4:], sig.samples[:-4])
    assert np.all(delayed.samples[:4] == 0)


@pytest.mark.utils
def test_fractional_delay_rotates_tone_phase(tone):
    """A tone delayed by a fraction of a sample matches the analytic delayed tone."""
    freq = 10e6
    delay = 2.3e-9
    n = 20_000
    sig = tone(freq, n)
    delayed = fractional_delay(sig, delay)
    t = np.arange(n) / RATE
    expected = np.exp(2j * np.pi * freq * (t - delay))
    interior = slice(FRACTIONAL_DELAY_TAPS, n - FRACTIONAL_DELAY_TAPS)
    assert np.max(np.abs(delayed.samples[interior] - expected[interior])) < 1e-4


@pytest.mark.utils
def test_fractional_delay_cascade(noise_signal):
    """Delaying by a then b equals delaying by a + b in the interior."""
    sig = noise_signal(duration_s=4e-5)
    twice = fractional_delay(fractional_delay(sig, 1.3e-9), 2.1e-9)
    once = fractional_delay(sig, 3.4e-9)
    interior = slice(2 * FRACTIONAL_DELAY_TAPS, len(sig) - 2 * FRACTIONAL_DELAY_TAPS)
    err = np.linalg.norm(twice.samples[interior] - once.samples[interior])
    assert err / np.linalg.norm(once.samples[interior]) < 1e-3


@pytest.mark.utils
def test_fractional_delay_is_linear(noise_signal):
    """Delaying a weighted sum equals the weighted sum of the delayed signals."""
    u = noise_signal(duration_s=2e-5, seed=1)
    v = noise_signal(duration_s=2e-5, seed=2)
    a, b = 0.7 - 0.2j, -1.3 + 0.4j
    combined = fractional_delay(u.with_samples(a * u.samples + b * v.samples), 3.7e-9)
    separate = a * fractional_delay(u, 3.7e-9).samples + b * fractional_delay(v, 3.7e-9).samples
    assert np.allclose(combined.samples, separate, rtol=0.0, atol=1e-12)


@pytest.mark.utils
def test_fractional_delay_errors(noise_signal):
    """Negative delays and delays longer than the record raise."""
    sig = noise_signal(duration_s=1e-6)
    with pytest.raises(ValueError, match="non-causal delay"):
        fractional_delay(sig, -1e-9)
    with pytest.raises(ValueError, match="exceeds"):
        fractional_delay(sig, 1e-3)


@pytest.mark.utils
def test_noise_floor_power_and_determinism():
    """Added noise has the requested power and depends only on the seed."""
    quiet = ComplexSignal(np.zeros(200_000), RATE)
    noisy = band_limited_noise_floor(quiet, -90.0, rng_seed=3)
    again = band_limited_noise_floor(quiet, -90.0, rng_seed=3)
    assert power_dbm(noisy) == pytest.approx(-90.0, abs=0.1)
    assert np.array_equal(noisy.samples, again.samples)
    assert band_limited_noise_floor(quiet, None, rng_seed=3) is quiet


@pytest.mark.utils
def test_band_filter_keeps_only_the_band(tone):
    """A bin-centred tone outside the band is removed, the one inside kept."""
    n = 10_000
    inside = tone(5e6, n)
    outside = tone(50e6, n)
    mixed = inside.with_samples(inside.samples + outside.samples)
    filtered = band_filter(mixed, (0.0, 10e6))
    assert np.allclose(filtered.samples, inside.samples, atol=1e-9)
