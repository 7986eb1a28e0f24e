"""Pydantic models for the analog LMS weight-control loop."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from models.common import ComplexValue

# About 1/20 of the divergence bound 2/(dt*N*P) for two branches fed ~21 dBm at 500 MS/s
DEFAULT_MU = 2e5
DEFAULT_DIVERGENCE_LIMIT = 1e6
# 64 blocks of 256 samples, about 33 us at 500 MS/s
DEFAULT_RESIDUAL_WINDOW = 64


class BranchMode(str, Enum):
    """Enum for the control mode of a canceller branch."""

    ADAPTIVE = "adaptive"
    MANUAL = "manual"


class BranchControl(BaseModel):
    """Model for the control of one canceller branch.

    Offsets are expressed in the units of the correlation x*z (mW), i.e. as the
    equivalent constant the integrator sees at its input.

    Attributes:
        mode (BranchMode): Self-adaptive integration or a held (manual) weight.
        manual_weight (Optional[ComplexValue]): Held weight; None lets the runner
            use the least-squares solution for this branch.
        dc_offset_i (float): I-integrator input DC offset.
        dc_offset_q (float): Q-integrator input DC offset.
        nulling_offset_i (float): Manually applied I nulling offset.
        nulling_offset_q (float): Manually applied Q nulling offset.
    """

    model_config = ConfigDict(extra="forbid")

    mode: BranchMode = Field(BranchMode.ADAPTIVE, description="Branch control mode")
    manual_weight: Optional[ComplexValue] = Field(
        None, description="Held weight for manual branches"
    )
    dc_offset_i: float = Field(0.0, description="I integrator DC offset (mW)")
    dc_offset_q: float = Field(0.0, description="Q integrator DC offset (mW)")
    nulling_offset_i: float = Field(0.0, description="I manual nulling offset (mW)")
    nulling_offset_q: float = Field(0.0, description="Q manual nulling offset (mW)")


class LmsConfig(BaseModel):
    """Model for the LMS loop.

    Attributes:
        mu (float): Step size in 1/(mW*s).
        integrator_dc_gain_db (Optional[float]): Finite integrator DC gain, None for an
            ideal (leak-free) integrator.
        branches (list[BranchControl]): Per-branch control; empty means every branch
            adaptive with zero offsets.
        trace_decimation (int): Samples per recorded trace point.
        residual_window (int): Trace points averaged into the residual power.
        divergence_limit (float): Weight magnitude treated as divergence.
    """

    model_config = ConfigDict(extra="forbid")

    mu: float = Field(DEFAULT_MU, gt=0, description="Step size in 1/(mW*s)")
    integrator_dc_gain_db: Optional[float] = Field(
        50.0, ge=0, description="Integrator DC gain in dB, null for ideal integrators"
    )
    branches: list[BranchControl] = Field(
        default_factory=list, description="Per-branch control"
    )
    trace_decimation: int = Field(256, ge=1, description="Samples per trace point")
    residual_window: int = Field(
        DEFAULT_RESIDUAL_WINDOW, ge=1, description="Trace points in the residual power moving average"
    )
    divergence_limit: float = Field(
        DEFAULT_DIVERGENCE_LIMIT, gt=0, description="Weight magnitude treated as divergence"
    )

    def branch_controls(self, n_taps: int) -> list[BranchControl]:
        """Return one control per branch, defaulting to adaptive branches.

        Raises:
            ValueError: If the configured branch list does not match ``n_taps``.
        """
        if not self.branches:
            return [BranchControl() for _ in range(n_taps)]
        if len(self.branches) != n_taps:
            raise ValueError(
                f"lms.branches has {len(self.branches)} entries for {n_taps} canceller branches"
            )
        return list(self.branches)
