"""N-branch fixed-delay canceller: cancellation-signal synthesis and subtraction.

The canceller regenerates the SI as a weighted sum of delayed copies of the PA
output (an interpolator over the fixed delays) and subtracts it at the receiver
input: z(t) = y(t) - sum_n w_n * x(t - tau_n). Vector modulators, combiner and the
canceller-path LNA are ideal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from survey_assist_utils.logging import get_logger

from models.canceller import CancellerConfig
from models.common import ComplexValue
from utils.app_types import ComplexArray
from utils.signal_utils import ComplexSignal, fractional_delay

logger = get_logger(__name__, level="INFO")


@dataclass(frozen=True, eq=False)
class CancellerWeights:
    """Complex branch weights w_n = w_{n,I} + j*w_{n,Q}.

    Attributes:
        w (ComplexArray): One weight per branch.
    """

    w: ComplexArray

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=np.complex128, copy=True).ravel()
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return int(self.w.size)

    @classmethod
    def zeros(cls, n_taps: int) -> CancellerWeights:
        """All-zero weights (canceller disabled)."""
        return cls(np.zeros(n_taps, dtype=np.complex128))

    @classmethod
    def from_models(cls, values: list[ComplexValue]) -> CancellerWeights:
        """Build weights from their I/Q models."""
        return cls(np.array([value.value for value in values], dtype=np.complex128))

    def to_models(self) -> list[ComplexValue]:
        """Return the weights as I/Q models for reports."""
        return [ComplexValue.from_complex(value) for value in self.w]


def _check_weights(cfg: CancellerConfig, w: CancellerWeights) -> None:
    if len(w) != cfg.branch_count:
        raise ValueError(
            f"weight length {len(w)} does not match {cfg.branch_count} canceller branches"
        )


def delayed_references(cfg: CancellerConfig, x_ref: ComplexSignal) -> ComplexArray:
    """Delayed copies x(t - tau_n) of the reference, one row per branch.

    Args:
        cfg (CancellerConfig): Canceller structure.
        x_ref (ComplexSignal): Reference (PA output) signal.

    Returns:
        ComplexArray: Array of shape (n_taps, len(x_ref)).
    """
    return np.stack(
        [fractional_delay(x_ref, delay).samples for delay in cfg.tap_delays_s]
    )


def synthesize(
    cfg: CancellerConfig, w: CancellerWeights, x_ref: ComplexSignal
) -> ComplexSignal:
    """Synthesize the cancellation signal sum_n w_n * x_ref(t - tau_n).

    Args:
        cfg (CancellerConfig): Canceller structure.
        w (CancellerWeights): Branch weights.
        x_ref (ComplexSignal): Reference (PA output) signal.

    Returns:
        ComplexSignal: Cancellation signal.

    Raises:
        ValueError: If the weight length does not match the branch count.
    """
    _check_weights(cfg, w)
    out = np.zeros(len(x_ref), dtype=np.complex128)
    for weight, delay in zip(w.w, cfg.tap_delays_s, strict=True):
        out += weight * fractional_delay(x_ref, delay).samples
    return x_ref.with_samples(out)


def cancel(
    cfg: CancellerConfig,
    w: CancellerWeights,
    y: ComplexSignal,
    x_ref: ComplexSignal,
) -> ComplexSignal:
    """Subtract the synthesized cancellation signal from the receiver input.

    Args:
        cfg (CancellerConfig): Canceller structure.
        w (CancellerWeights): Branch weights.
        y (ComplexSignal): Receiver input (SI plus anything else received).
        x_ref (ComplexSignal): Time-aligned reference (PA output).

    Returns:
        ComplexSignal: Canceller output z.

    Raises:
        ValueError: On rate or length mismatch between y and x_ref.
    """
    if y.sample_rate_hz != x_ref.sample_rate_hz:
        raise ValueError(
            f"sample rate mismatch: y {y.sample_rate_hz} Hz vs x_ref {x_ref.sample_rate_hz} Hz"
        )
    if len(y) != len(x_ref):
        raise ValueError(f"length mismatch: y {len(y)} vs x_ref {len(x_ref)}")
    cancellation = synthesize(cfg, w, x_ref)
    return y.with_samples(y.samples - cancellation.samples)
