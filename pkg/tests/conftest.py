"""Pytest configuration and fixtures for the RF canceller simulator tests.

This module provides signal factories, default configurations and a logger double
shared by the unit and scenario tests.
"""

from types import ModuleType
from typing import Any, Callable

import numpy as np
import pytest

from models.canceller import CancellerConfig
from models.channel import ChannelTap, SiChannel
from models.pa import PaParams
from models.waveform import WaveformKind, WaveformSpec
from utils.channel_utils import preset
from utils.pa_utils import amplify
from utils.signal_utils import ComplexSignal
from utils.waveform_utils import generate

# pylint cannot differentiate the use of fixtures in the test functions
# pylint: disable=unused-argument, disable=redefined-outer-name

RATE_HZ = 500e6


@pytest.fixture
def rate_hz() -> float:
    """Simulation sample rate used across the tests."""
    return RATE_HZ


@pytest.fixture
def tone() -> Callable[..., ComplexSignal]:
    """Factory for a complex tone: tone(freq_hz, n_samples, power_mw=1.0)."""

    def _make(freq_hz: float, n_samples: int, power_mw: float = 1.0) -> ComplexSignal:
        t = np.arange(n_samples) / RATE_HZ
        return ComplexSignal(np.sqrt(power_mw) * np.exp(2j * np.pi * freq_hz * t), RATE_HZ)

    return _make


@pytest.fixture
def noise_signal() -> Callable[..., ComplexSignal]:
    """Factory for a band-limited noise waveform (PA input level by default)."""

    def _make(
        bandwidth_hz: float = 20e6,
        duration_s: float = 2e-4,
        power_dbm: float = 0.0,
        seed: int = 7,
    ) -> ComplexSignal:
        spec = WaveformSpec(
            kind=WaveformKind.BANDLIMITED_NOISE,
            bandwidth_hz=bandwidth_hz,
            power_dbm=power_dbm,
            duration_s=duration_s,
            seed=seed,
        )
        return generate(spec, RATE_HZ)

    return _make


@pytest.fixture
def pa_output(noise_signal) -> Callable[..., ComplexSignal]:
    """Factory for the default PA driven by band-limited noise at 0 dBm."""

    def _make(bandwidth_hz: float = 20e6, duration_s: float = 2e-4, seed: int = 7):
        return amplify(noise_signal(bandwidth_hz, duration_s, 0.0, seed), PaParams())

    return _make


@pytest.fixture
def canceller_config() -> CancellerConfig:
    """Default two-branch canceller (5 ns and 7.5 ns)."""
    return CancellerConfig()


@pytest.fixture
def quiet_circulator() -> SiChannel:
    """Circulator preset with the receiver noise switched off."""
    return preset("circulator").model_copy(update={"noise_floor_dbm": None})


@pytest.fixture
def exact_span_channel() -> SiChannel:
    """Channel whose two taps sit exactly on the canceller delays, -90 dBm noise."""
    return SiChannel(
        taps=[
            ChannelTap(delay_s=5e-9, gain_db=-20.0, phase_rad=0.4),
            ChannelTap(delay_s=7.5e-9, gain_db=-25.0, phase_rad=-1.1),
        ],
        noise_floor_dbm=-90.0,
    )


class LogCapture:
    """Lightweight logger double for tests.

    Captures messages by level. Accepts *args and **kwargs so calls with 'extra'
    work.
    """

    # pylint: disable=too-few-public-methods
    def __init__(self) -> None:
        self.infos: list[str] = []
        self.debugs: list[str] = []
        self.warnings: list[str] = []
        self.errors: list[str] = []

    def info(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Capture info logs."""
        self.infos.append(str(msg))

    def debug(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Capture debug logs."""
        self.debugs.append(str(msg))

    def warning(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Capture warning logs."""
        self.warnings.append(str(msg))

    def error(self, msg: str, *args: Any, **kwargs: Any) -> None:
        """Capture error logs."""
        self.errors.append(str(msg))


@pytest.fixture
def log_capture() -> LogCapture:
    """Provide a fresh LogCapture for each test."""
    return LogCapture()


@pytest.fixture
def patch_module_logger(
    monkeypatch: pytest.MonkeyPatch,
) -> Callable[[ModuleType, LogCapture], LogCapture]:
    """Return a helper that patches `module.logger` with a LogCapture.

    Args:
        monkeypatch: Built-in pytest fixture for safe attribute patching.

    Returns:
        A callable that takes (module, log_capture) and applies the patch.
    """

    def _apply(module: ModuleType, stub: LogCapture) -> LogCapture:
        monkeypatch.setattr(module, "logger", stub, raising=True)
        return stub

    return _apply
