"""Pydantic models for measurement results and the per-scenario report."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from models.common import ComplexValue
from models.scenario import ScenarioConfig


class CancellationReport(BaseModel):
    """Model for the intrinsic/active/total split of SI suppression.

    dB values are quantised to 2^-20 dB so total_db = intrinsic_db + active_db holds
    exactly.

    Attributes:
        band_hz (list[float]): Measurement band [f_lo, f_hi].
        p_tx_dbm (float): PA output power in band.
        p_y_dbm (float): SI power at the receiver input in band.
        p_z_dbm (float): SI power after cancellation in band.
        intrinsic_db (float): p_tx - p_y.
        active_db (float): p_y - p_z.
        total_db (float): p_tx - p_z.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    band_hz: list[float] = Field(..., min_length=2, max_length=2, description="[f_lo, f_hi]")
    p_tx_dbm: float = Field(..., description="PA output power in band")
    p_y_dbm: float = Field(..., description="Receiver-input SI power in band")
    p_z_dbm: float = Field(..., description="Residual SI power in band")
    intrinsic_db: float = Field(..., description="Intrinsic isolation")
    active_db: float = Field(..., description="Active RF cancellation")
    total_db: float = Field(..., description="Total cancellation")


class SoiFidelity(BaseModel):
    """Model for how well the signal of interest survives cancellation.

    Attributes:
        band_hz (list[float]): SoI band.
        power_delta_db (float): Output minus injected SoI-band power.
        evm_db (float): EVM after one-tap alignment, -inf for a perfect match.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    band_hz: list[float] = Field(..., min_length=2, max_length=2, description="SoI band")
    power_delta_db: float = Field(..., description="Output minus injected SoI power")
    evm_db: float = Field(..., description="EVM in dB")


class Imd3Report(BaseModel):
    """Model for the two-tone PA check: measured IMD3 against the closed form."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    per_tone_input_dbm: float = Field(..., description="PA input power per tone")
    main_tone_dbm: float = Field(..., description="Measured PA output main tone")
    measured_dbc: float = Field(..., description="Measured worst IMD3 in dBc")
    oracle_dbc: float = Field(..., description="Closed-form IMD3 in dBc")


class ScenarioReport(BaseModel):
    """Model for the report.json written by a scenario run.

    Attributes:
        name (str): Scenario name.
        version (str): Simulator version.
        seed (int): Master seed.
        cancellation (CancellationReport): Steady-state cancellation split.
        convergence_time_s (Optional[float]): Initial convergence time, measured up to
            the first disturbance; None when the residual never settles.
        reconvergence_time_s (Optional[float]): Time to settle after the first
            disturbance, None without disturbances or when it never settles.
        oracle_active_db (Optional[float]): Active cancellation of fixed least-squares
            weights over the steady-state segment, None when they cannot be solved.
        final_weights (list[ComplexValue]): Weights after the last sample.
        soi_fidelity (Optional[SoiFidelity]): SoI metrics when a SoI is injected.
        imd3 (Optional[Imd3Report]): Two-tone PA check for two-tone waveforms.
        config (ScenarioConfig): Echo of the configuration that produced the report.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str = Field(..., description="Scenario name")
    version: str = Field(..., description="Simulator version")
    seed: int = Field(..., description="Master seed")
    cancellation: CancellationReport
    convergence_time_s: Optional[float] = Field(None, description="Convergence time")
    reconvergence_time_s: Optional[float] = Field(
        None, description="Re-convergence time after the first disturbance"
    )
    oracle_active_db: Optional[float] = Field(
        None, description="Active cancellation of the least-squares weights"
    )
    final_weights: list[ComplexValue] = Field(..., description="Final branch weights")
    soi_fidelity: Optional[SoiFidelity] = None
    imd3: Optional[Imd3Report] = None
    config: ScenarioConfig
