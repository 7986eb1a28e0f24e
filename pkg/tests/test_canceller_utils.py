"""Unit tests for cancellation-signal synthesis and subtraction."""

# ruff: noqa: PLR2004
# pylint: disable=redefined-outer-name

import numpy as np
import pytest
from pydantic import ValidationError

from models.canceller import CancellerConfig
from models.channel import ChannelTap, SiChannel
from utils.canceller_utils import (
    CancellerWeights,
    cancel,
    delayed_references,
    synthesize,
)
from utils.channel_utils import propagate, tap_coefficients
from utils.lms_utils import interior_slice, wiener_solution
from utils.metrics_utils import cancellation_report
from utils.signal_utils import ComplexSignal, power_dbm


@pytest.mark.utils
def test_config_defaults_and_validation():
    """Two branches at 5 and 7.5 ns by default; delays must increase."""
    cfg = CancellerConfig()
    assert cfg.tap_delays_s == [5e-9, 7.5e-9]
    assert cfg.n_taps == 2
    with pytest.raises(ValidationError, match="strictly increasing"):
        CancellerConfig(tap_delays_s=[5e-9, 5e-9])
    with pytest.raises(ValidationError, match="does not match"):
        CancellerConfig(tap_delays_s=[5e-9], n_taps=2)


@pytest.mark.utils
def test_weights_must_be_finite():
    """Non-finite weights are rejected."""
    with pytest.raises(ValueError, match="finite"):
        CancellerWeights(np.array([np.inf, 0.0]))


@pytest.mark.utils
def test_zero_weights_synthesize_zero(canceller_config, pa_output):
    """All-zero weights produce an all-zero cancellation signal."""
    x = pa_output(duration_s=2e-5)
    out = synthesize(canceller_config, CancellerWeights.zeros(2), x)
    assert not np.any(out.samples)


@pytest.mark.utils
def test_single_undelayed_unit_branch_is_identity(pa_output):
    """N=1, w=1, tau=0 returns the reference."""
    x = pa_output(duration_s=2e-5)
    cfg = CancellerConfig(tap_delays_s=[0.0])
    assert np.array_equal(synthesize(cfg, CancellerWeights(np.array([1.0])), x).samples, x.samples)


@pytest.mark.utils
def test_weight_length_mismatch_raises(canceller_config, pa_output):
    """The weight vector must match the branch count."""
    x = pa_output(duration_s=2e-5)
    with pytest.raises(ValueError, match="does not match"):
        synthesize(canceller_config, CancellerWeights.zeros(3), x)


@pytest.mark.utils
def test_cancel_rate_and_length_mismatch(canceller_config, pa_output):
    """y and the reference must share rate and length."""
    x = pa_output(duration_s=2e-5)
    w = CancellerWeights.zeros(2)
    with pytest.raises(ValueError, match="length mismatch"):
        cancel(canceller_config, w, x.with_samples(x.samples[:-1]), x)
    with pytest.raises(ValueError, match="sample rate mismatch"):
        cancel(canceller_config, w, ComplexSignal(x.samples, 250e6), x)


@pytest.mark.utils
def test_disabled_canceller_passes_y_through(canceller_config, pa_output):
    """w = 0 leaves the receiver input unchanged."""
    x = pa_output(duration_s=2e-5)
    y = x.with_samples(0.1 * x.samples)
    assert np.array_equal(cancel(canceller_config, CancellerWeights.zeros(2), y, x).samples, y.samples)


@pytest.mark.utils
def test_exact_regeneration_cancels_to_zero(canceller_config, pa_output):
    """Cancelling a signal synthesized with the same weights leaves nothing."""
    x = pa_output(duration_s=2e-5)
    w = CancellerWeights(np.array([0.1 - 0.05j, -0.03 + 0.02j]))
    y = synthesize(canceller_config, w, x)
    assert not np.any(cancel(canceller_config, w, y, x).samples)


@pytest.mark.utils
def test_synthesis_matches_channel_in_tap_span(canceller_config, pa_output):
    """Weights equal to in-span channel taps regenerate the noise-free SI."""
    x = pa_output(duration_s=4e-5)
    ch = SiChannel(
        taps=[
            ChannelTap(delay_s=5e-9, gain_db=-20.0, phase_rad=0.7),
            ChannelTap(delay_s=7.5e-9, gain_db=-26.0, phase_rad=2.0),
        ],
        noise_floor_dbm=None,
    )
    y = propagate(ch, x, rng_seed=0)
    regenerated = synthesize(canceller_config, CancellerWeights(tap_coefficients(ch)), x)
    residual = y.with_samples(y.samples - regenerated.samples)
    if np.any(residual.samples):
        assert power_dbm(residual) - power_dbm(y) < -60.0


@pytest.mark.utils
def test_linearity_and_scaling(canceller_config, pa_output):
    """Cancellation is linear in (y, w) and invariant to reference/weight rescaling."""
    x = pa_output(duration_s=2e-5)
    rng = np.random.default_rng(0)
    y1 = x.with_samples(rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x)))
    y2 = x.with_samples(rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x)))
    w1 = CancellerWeights(np.array([0.2 + 0.1j, -0.1j]))
    w2 = CancellerWeights(np.array([-0.05, 0.3 - 0.2j]))

    combined = cancel(
        canceller_config,
        CancellerWeights(w1.w + w2.w),
        y1.with_samples(y1.samples + y2.samples),
        x,
    )
    separate = cancel(canceller_config, w1, y1, x).samples + cancel(canceller_config, w2, y2, x).samples
    assert np.allclose(combined.samples, separate, rtol=1e-12, atol=1e-12)

    g = 0.7 * np.exp(1.3j)
    scaled = synthesize(canceller_config, CancellerWeights(w1.w / g), x.with_samples(g * x.samples))
    assert np.allclose(scaled.samples, synthesize(canceller_config, w1, x).samples, rtol=1e-12, atol=1e-12)


@pytest.mark.utils
def test_wiener_weights_cancel_circulator_20mhz(canceller_config, pa_output, quiet_circulator):
    """Least-squares weights give at least 25 dB of active cancellation at 20 MHz."""
    x = pa_output(bandwidth_hz=20e6, duration_s=2e-4)
    y = propagate(quiet_circulator, x, rng_seed=0)
    w = wiener_solution(x, y, canceller_config)
    z = cancel(canceller_config, w, y, x)
    report = cancellation_report(x, y, z, (-10e6, 10e6), steady_start_frac=0.1)
    assert report.active_db >= 25.0


@pytest.mark.utils
def test_wiener_residual_is_orthogonal_to_references(canceller_config, pa_output, quiet_circulator):
    """The least-squares residual is uncorrelated with every delayed reference."""
    x = pa_output(bandwidth_hz=20e6, duration_s=2e-4)
    y = propagate(quiet_circulator, x, rng_seed=0)
    z = cancel(canceller_config, wiener_solution(x, y, canceller_config), y, x)
    interior = interior_slice(canceller_config, x)
    refs = delayed_references(canceller_config, x)[:, interior]
    zs = z.samples[interior]
    for ref in refs:
        corr = abs(np.vdot(ref, zs)) / (np.linalg.norm(ref) * np.linalg.norm(zs))
        assert corr < 1e-3


@pytest.mark.utils
def test_weight_models_round_trip():
    """Weights convert to and from their I/Q models."""
    w = CancellerWeights(np.array([0.1 - 0.2j, 0.3j]))
    assert np.array_equal(CancellerWeights.from_models(w.to_models()).w, w.w)
