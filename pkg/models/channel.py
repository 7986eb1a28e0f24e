"""Pydantic models for the multipath self-interference coupling channel.

A channel is a set of taps (delay, gain, reflection phase) plus a receiver noise floor
and an optional schedule of disturbances that change tap gains/phases over time.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DEFAULT_CARRIER_HZ = 2.4e9


class ChannelPreset(str, Enum):
    """Enum for the bundled channel configurations."""

    CIRCULATOR = "circulator"
    DUAL_ANTENNA = "dual_antenna"


class DisturbanceKind(str, Enum):
    """Enum for disturbance event shapes."""

    STEP = "step"
    RAMP = "ramp"


class ChannelTap(BaseModel):
    """Model for one coupling path.

    Attributes:
        delay_s (float): Path delay in seconds.
        gain_db (float): Attenuation relative to the PA output (negative dB).
        phase_rad (float): Reflection phase of the path.
        label (Optional[str]): Human-readable path name.
    """

    model_config = ConfigDict(extra="forbid")

    delay_s: float = Field(..., ge=0, description="Path delay in seconds")
    gain_db: float = Field(..., description="Gain relative to the PA output in dB")
    phase_rad: float = Field(0.0, description="Reflection phase in radians")
    label: Optional[str] = Field(None, description="Path name")


class DisturbanceEvent(BaseModel):
    """Model for a scheduled change of one tap.

    Attributes:
        time_s (float): Event start time.
        tap_index (int): Index of the affected tap.
        kind (DisturbanceKind): Instant step or linear ramp.
        new_gain_db (float): Gain after the event.
        new_phase_rad (float): Phase after the event.
        ramp_duration_s (Optional[float]): Ramp length (ramps only).
    """

    model_config = ConfigDict(extra="forbid")

    time_s: float = Field(..., ge=0, description="Event start time in seconds")
    tap_index: int = Field(..., ge=0, description="Index of the affected tap")
    kind: DisturbanceKind = Field(DisturbanceKind.STEP, description="Event shape")
    new_gain_db: float = Field(..., description="Tap gain after the event in dB")
    new_phase_rad: float = Field(..., description="Tap phase after the event in radians")
    ramp_duration_s: Optional[float] = Field(
        None, description="Ramp duration in seconds (ramp events only)"
    )

    @model_validator(mode="after")
    def _check_ramp(self) -> "DisturbanceEvent":
        if self.kind == DisturbanceKind.RAMP and not (self.ramp_duration_s or 0.0) > 0:
            raise ValueError("ramp_duration_s must be > 0 for ramp events")
        return self


class SiChannel(BaseModel):
    """Model for the multipath SI channel.

    Attributes:
        taps (list[ChannelTap]): Coupling paths, sorted by delay.
        noise_floor_dbm (Optional[float]): Full-band receiver noise, None = noiseless.
        events (list[DisturbanceEvent]): Disturbance schedule.
        carrier_hz (float): RF carrier; a path of delay d rotates the baseband-equivalent
            tap by exp(-j*2*pi*carrier_hz*d). 0 models a pure baseband channel.
    """

    model_config = ConfigDict(extra="forbid")

    taps: list[ChannelTap] = Field(..., min_length=1, description="Coupling paths")
    noise_floor_dbm: Optional[float] = Field(
        -90.0, description="Full-band receiver noise power in dBm, null for none"
    )
    events: list[DisturbanceEvent] = Field(
        default_factory=list, description="Disturbance schedule"
    )
    carrier_hz: float = Field(
        DEFAULT_CARRIER_HZ, ge=0, description="RF carrier frequency in Hz"
    )

    @field_validator("taps")
    @classmethod
    def _check_sorted(cls, taps: list[ChannelTap]) -> list[ChannelTap]:
        delays = [tap.delay_s for tap in taps]
        if delays != sorted(delays):
            raise ValueError("taps must be sorted by delay")
        return taps

    @model_validator(mode="after")
    def _check_events(self) -> "SiChannel":
        for event in self.events:
            if event.tap_index >= len(self.taps):
                raise ValueError(
                    f"event tap_index {event.tap_index} out of range for {len(self.taps)} taps"
                )
        self.events = sorted(self.events, key=lambda event: event.time_s)
        return self
