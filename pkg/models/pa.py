"""Pydantic model for the memoryless power-amplifier nonlinearity."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from models.common import ComplexValue

# 1 dB input compression at ~-1 dBm for a constant-envelope drive: |1 + a3*P| = -1 dB
DEFAULT_A3 = ComplexValue(re=-0.1369, im=0.0)


class PaParams(BaseModel):
    """Model for the odd-order baseband polynomial PA.

    y = g * (x + a3*x*|x|^2 + a5*x*|x|^4) with g = 10^(gain_db/20), plus an optional
    constant carrier (LO) leakage term.

    Attributes:
        gain_db (float): Small-signal gain.
        a3 (ComplexValue): Third-order coefficient, normalised to unit gain (1/mW).
        a5 (ComplexValue): Fifth-order coefficient, normalised to unit gain (1/mW^2).
        lo_leakage_dbc (Optional[float]): Carrier leakage relative to output power.
    """

    model_config = ConfigDict(extra="forbid")

    gain_db: float = Field(21.0, description="Small-signal gain in dB")
    a3: ComplexValue = Field(
        default_factory=lambda: DEFAULT_A3.model_copy(),
        description="Third-order coefficient (1/mW)",
    )
    a5: ComplexValue = Field(
        default_factory=ComplexValue, description="Fifth-order coefficient (1/mW^2)"
    )
    lo_leakage_dbc: Optional[float] = Field(
        None, description="LO leakage relative to the output signal power, None = off"
    )
