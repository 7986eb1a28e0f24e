"""Pydantic models for scenario configuration files.

A scenario binds a waveform, PA, SI channel, canceller and LMS loop into one
reproducible experiment. Scenario files are JSON; unknown keys are rejected so
typos surface as field-level errors.
"""

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.canceller import CancellerConfig
from models.channel import ChannelPreset, DisturbanceEvent, SiChannel
from models.lms import LmsConfig
from models.pa import PaParams
from models.waveform import WaveformSpec

DEFAULT_DURATION_S = 20e-3
# Trace points needed for a convergence window and a steady-state median
MIN_TRACE_BLOCKS = 16


class SoiInjection(BaseModel):
    """Model for the signal of interest added at the receiver input.

    Attributes:
        bandwidth_hz (Optional[float]): SoI bandwidth; None uses a tenth of the
            transmit bandwidth.
        center_hz (float): SoI centre frequency relative to the carrier.
        injection_power_dbm (float): SoI power at the receiver input.
    """

    model_config = ConfigDict(extra="forbid")

    bandwidth_hz: Optional[float] = Field(None, gt=0, description="SoI bandwidth in Hz")
    center_hz: float = Field(0.0, description="SoI centre frequency in Hz")
    injection_power_dbm: float = Field(-50.0, description="SoI power in dBm")


class OutputFlags(BaseModel):
    """Model for the artifacts a run writes."""

    model_config = ConfigDict(extra="forbid")

    psd: bool = Field(True, description="Write psd_tx/psd_y/psd_z CSV files")
    weight_trace: bool = Field(True, description="Write the weight/residual trace CSV")
    report: bool = Field(True, description="Write report.json")


class ScenarioConfig(BaseModel):
    """Model for a complete scenario.

    The scenario's ``duration_s`` and ``seed`` govern the run: the waveform's own
    duration and seed are replaced by the duration and a seed derived from the
    scenario seed.

    Attributes:
        name (str): Scenario name, also the output sub-directory.
        description (str): One-line description for listings.
        waveform (WaveformSpec): Transmit waveform (PA input).
        pa (PaParams): PA model.
        channel (SiChannel | ChannelPreset): Explicit channel or a preset name.
        disturbances (list[DisturbanceEvent]): Events appended to the channel.
        canceller (CancellerConfig): Canceller structure.
        lms (LmsConfig): LMS loop.
        soi (Optional[SoiInjection]): Signal of interest, None for SI only.
        duration_s (float): Simulated time.
        sample_rate_hz (float): Simulation sample rate.
        seed (int): Master seed.
        steady_state_start_frac (float): Start of the measurement segment.
        outputs (OutputFlags): Artifacts to write.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1, description="Scenario name")
    description: str = Field("", description="One-line description")
    waveform: WaveformSpec = Field(..., description="Transmit waveform")
    pa: PaParams = Field(default_factory=PaParams, description="PA model")
    channel: Union[ChannelPreset, SiChannel] = Field(
        ..., description="SI channel or preset name"
    )
    disturbances: list[DisturbanceEvent] = Field(
        default_factory=list, description="Disturbance events appended to the channel"
    )
    canceller: CancellerConfig = Field(
        default_factory=CancellerConfig, description="Canceller structure"
    )
    lms: LmsConfig = Field(default_factory=LmsConfig, description="LMS loop")
    soi: Optional[SoiInjection] = Field(None, description="Signal of interest")
    duration_s: float = Field(DEFAULT_DURATION_S, gt=0, description="Simulated time in s")
    sample_rate_hz: float = Field(..., gt=0, description="Sample rate in Hz")
    seed: int = Field(0, ge=0, description="Master seed")
    steady_state_start_frac: float = Field(
        0.5, ge=0, lt=1, description="Start of the steady-state segment"
    )
    outputs: OutputFlags = Field(default_factory=OutputFlags, description="Artifacts")

    @model_validator(mode="after")
    def _check_duration(self) -> "ScenarioConfig":
        n_samples = int(round(self.duration_s * self.sample_rate_hz))
        needed = MIN_TRACE_BLOCKS * self.lms.trace_decimation
        if n_samples < needed:
            raise ValueError(
                f"duration_s {self.duration_s} gives {n_samples} samples, "
                f"at least {needed} are needed for the convergence window"
            )
        if self.lms.branches and len(self.lms.branches) != self.canceller.branch_count:
            raise ValueError(
                f"lms.branches has {len(self.lms.branches)} entries for "
                f"{self.canceller.branch_count} canceller branches"
            )
        return self
