"""Pydantic models describing the transmit and signal-of-interest test waveforms."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class WaveformKind(str, Enum):
    """Enum for test waveform kinds."""

    BANDLIMITED_NOISE = "bandlimited_noise"
    TWO_TONE = "two_tone"
    SOI = "soi"


class WaveformSpec(BaseModel):
    """Model for a generated test waveform.

    Attributes:
        kind (WaveformKind): Band-limited carrier, two-tone PA stimulus or SoI.
        bandwidth_hz (Optional[float]): Occupied bandwidth (band-limited kinds).
        tone_spacing_hz (Optional[float]): Tone spacing (two-tone).
        center_hz (float): Baseband centre frequency of the waveform.
        power_dbm (float): Total waveform power.
        duration_s (float): Record length.
        seed (int): Generator seed.
    """

    model_config = ConfigDict(extra="forbid")

    kind: WaveformKind = Field(..., description="Waveform kind")
    bandwidth_hz: Optional[float] = Field(
        None, gt=0, description="Occupied bandwidth for band-limited kinds"
    )
    tone_spacing_hz: Optional[float] = Field(
        None, gt=0, description="Tone spacing for the two-tone stimulus"
    )
    center_hz: float = Field(0.0, description="Baseband centre frequency")
    power_dbm: float = Field(0.0, description="Total power in dBm")
    duration_s: float = Field(1e-3, gt=0, description="Record length in seconds")
    seed: int = Field(0, description="Generator seed")

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "WaveformSpec":
        if self.kind == WaveformKind.TWO_TONE:
            if self.tone_spacing_hz is None:
                raise ValueError("tone_spacing_hz is required for two_tone waveforms")
        elif self.bandwidth_hz is None:
            raise ValueError(f"bandwidth_hz is required for {self.kind.value} waveforms")
        return self

    def occupied_band(self) -> tuple[float, float]:
        """Return the nominal [f_lo, f_hi] band of the waveform in Hz.

        Band-limited kinds occupy center +/- bandwidth/2. A two-tone waveform has its
        tones at center +/- spacing/2; its band is center +/- spacing so the IMD3
        products at +/- 3*spacing/2 stay just outside and the main tones well inside.
        """
        if self.kind == WaveformKind.TWO_TONE:
            half_width = float(self.tone_spacing_hz or 0.0)
        else:
            half_width = float(self.bandwidth_hz or 0.0) / 2.0
        return (self.center_hz - half_width, self.center_hz + half_width)
