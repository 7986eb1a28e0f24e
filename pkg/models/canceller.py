"""Pydantic model for the fixed-delay, complex-weighted RF canceller."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_TAP_DELAYS_S = [5e-9, 7.5e-9]


class CancellerConfig(BaseModel):
    """Model for the canceller branch structure.

    Attributes:
        tap_delays_s (list[float]): Fixed branch delays, strictly increasing.
        n_taps (Optional[int]): Branch count; derived from the delays when omitted.
        amplitude_only (bool): Restrict weights to real values (attenuator-only
            branches without phase control).
        weight_cap (Optional[float]): Maximum weight magnitude (vector-modulator
            saturation), None for unconstrained.
    """

    model_config = ConfigDict(extra="forbid")

    tap_delays_s: list[float] = Field(
        default_factory=lambda: list(DEFAULT_TAP_DELAYS_S),
        min_length=1,
        description="Fixed branch delays in seconds",
    )
    n_taps: Optional[int] = Field(None, ge=1, description="Number of branches")
    amplitude_only: bool = Field(False, description="Real-valued weights only")
    weight_cap: Optional[float] = Field(
        None, gt=0, description="Maximum weight magnitude, null for none"
    )

    @model_validator(mode="after")
    def _check_delays(self) -> "CancellerConfig":
        if any(delay < 0 for delay in self.tap_delays_s):
            raise ValueError("tap_delays_s must be >= 0")
        if any(b <= a for a, b in zip(self.tap_delays_s, self.tap_delays_s[1:])):
            raise ValueError("tap_delays_s must be strictly increasing")
        if self.n_taps is None:
            self.n_taps = len(self.tap_delays_s)
        elif self.n_taps != len(self.tap_delays_s):
            raise ValueError(
                f"n_taps {self.n_taps} does not match {len(self.tap_delays_s)} tap delays"
            )
        return self

    @property
    def branch_count(self) -> int:
        """Number of branches as an int (always set after validation)."""
        return len(self.tap_delays_s)
