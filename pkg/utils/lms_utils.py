"""Self-adaptive analog LMS control of the canceller weights.

Each branch has an I and a Q integrator fed by the correlation of the delayed
reference with the IQ-demodulated residual:

    w_I += mu*dt * (x_I*z_I + x_Q*z_Q + o_I + v_I)
    w_Q += mu*dt * (x_I*z_Q - x_Q*z_I + o_Q + v_Q)

which is the complex update w += mu*dt * conj(x)*z plus the integrator DC offsets o
and the manual nulling offsets v. A finite integrator DC gain G (linear) is a
first-order leak applied after every update:

    lambda = 1 - mu*dt*(1 mW)/G

so the loop settles on the least-squares solution regularised by 1 mW/G, a bias that
does not depend on mu and shrinks as G grows.

The closed loop runs sample by sample in a numba kernel; ``lms_step`` is the
readable single-sample form of the same update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy import linalg
from survey_assist_utils.logging import get_logger

from models.canceller import CancellerConfig
from models.channel import SiChannel
from models.lms import BranchControl, BranchMode, LmsConfig
from utils.app_types import BoolArray, ComplexArray, RealArray
from utils.canceller_utils import CancellerWeights, delayed_references
from utils.channel_utils import propagate
from utils.signal_utils import FRACTIONAL_DELAY_TAPS, ComplexSignal, mw_to_dbm

logger = get_logger(__name__, level="INFO")

# Leak reference power: the integrator leak equals a 1 mW correlation divided by G
LEAK_REFERENCE_MW = 1.0
WIENER_MAX_CONDITION = 1e10
WIENER_MIN_SAMPLES_PER_TAP = 100


class LmsDivergenceError(RuntimeError):
    """Raised when a branch weight exceeds the divergence limit."""


@dataclass(frozen=True, eq=False)
class LmsTrace:
    """Decimated record of a closed-loop run.

    Attributes:
        times_s (RealArray): Start time of every trace block.
        weights (ComplexArray): Block-mean weights, shape (n_blocks, n_taps).
        residual_power_dbm (RealArray): Residual power over a sliding window of
            blocks ending at each block.
        final_weights (CancellerWeights): Weights after the last sample.
    """

    times_s: RealArray
    weights: ComplexArray
    residual_power_dbm: RealArray
    final_weights: CancellerWeights

    def __len__(self) -> int:
        return int(self.times_s.size)

    def __post_init__(self) -> None:
        if not self.times_s.size == self.weights.shape[0] == self.residual_power_dbm.size:
            raise ValueError("trace arrays must be time-aligned")


def leak_factor(lms: LmsConfig, dt: float) -> float:
    """Per-sample leak multiplier, 1.0 for ideal integrators."""
    if lms.integrator_dc_gain_db is None:
        return 1.0
    dc_gain = 10.0 ** (lms.integrator_dc_gain_db / 20.0)
    return 1.0 - lms.mu * dt * LEAK_REFERENCE_MW / dc_gain


def _offsets(controls: list[BranchControl]) -> tuple[RealArray, RealArray]:
    # o + v is formed before it enters the update so equal-and-opposite nulling
    # cancels exactly
    offset_i = np.array([c.dc_offset_i + c.nulling_offset_i for c in controls])
    offset_q = np.array([c.dc_offset_q + c.nulling_offset_q for c in controls])
    return offset_i, offset_q


def _adaptive_mask(controls: list[BranchControl]) -> BoolArray:
    return np.array([c.mode == BranchMode.ADAPTIVE for c in controls], dtype=np.bool_)


def lms_step(
    w: CancellerWeights,
    x_delayed: ComplexArray,
    z: complex,
    dt: float,
    cfg: LmsConfig,
    amplitude_only: bool = False,
    weight_cap: Optional[float] = None,
) -> CancellerWeights:
    """Apply one LMS update to the adaptive branches.

    Args:
        w (CancellerWeights): Current weights.
        x_delayed (ComplexArray): Delayed reference sample of every branch.
        z (complex): Residual (canceller output) sample.
        dt (float): Sample period in seconds.
        cfg (LmsConfig): Loop configuration.
        amplitude_only (bool): Hold the Q integrators at zero.
        weight_cap (float | None): Maximum weight magnitude.

    Returns:
        CancellerWeights: Updated weights; manual branches are unchanged.
    """
    controls = cfg.branch_controls(len(w))
    x_delayed = np.asarray(x_delayed, dtype=np.complex128)
    if x_delayed.shape != w.w.shape:
        raise ValueError(
            f"x_delayed has {x_delayed.size} entries for {len(w)} branches"
        )
    offset_i, offset_q = _offsets(controls)
    step = cfg.mu * dt
    leak = leak_factor(cfg, dt)

    x_i, x_q = x_delayed.real, x_delayed.imag
    z_i, z_q = z.real, z.imag
    w_i = (w.w.real + step * (x_i * z_i + x_q * z_q + offset_i)) * leak
    if amplitude_only:
        w_q = np.zeros_like(w_i)
    else:
        w_q = (w.w.imag + step * (x_i * z_q - x_q * z_i + offset_q)) * leak
    updated = w_i + 1j * w_q

    if weight_cap is not None:
        magnitude = np.abs(updated)
        over = magnitude > weight_cap
        updated[over] *= weight_cap / magnitude[over]

    return CancellerWeights(np.where(_adaptive_mask(controls), updated, w.w))


@njit(cache=True, nogil=True)
def _closed_loop_kernel(
    y,
    refs,
    w,
    adaptive,
    offset_i,
    offset_q,
    step,
    leak,
    amplitude_only,
    cap,
    limit,
    decimation,
    z_out,
    w_trace,
    p_trace,
):  # pragma: no cover - compiled
    """Run the loop in place; returns the sample index of divergence or -1."""
    n_taps, n_samples = refs.shape
    n_blocks = p_trace.shape[0]
    block = 0
    count = 0
    p_acc = 0.0
    w_acc = np.zeros(n_taps, dtype=np.complex128)

    for m in range(n_samples):
        acc = 0j
        for n in range(n_taps):
            acc += w[n] * refs[n, m]
        zm = y[m] - acc
        z_out[m] = zm
        z_i = zm.real
        z_q = zm.imag

        for n in range(n_taps):
            if adaptive[n]:
                x_i = refs[n, m].real
                x_q = refs[n, m].imag
                w_i = (w[n].real + step * (x_i * z_i + x_q * z_q + offset_i[n])) * leak
                if amplitude_only:
                    w_q = 0.0
                else:
                    w_q = (w[n].imag + step * (x_i * z_q - x_q * z_i + offset_q[n])) * leak
                magnitude = math.sqrt(w_i * w_i + w_q * w_q)
                if magnitude > cap:
                    w_i *= cap / magnitude
                    w_q *= cap / magnitude
                    magnitude = cap
                w[n] = w_i + 1j * w_q
                if not magnitude <= limit:
                    return m

        if block < n_blocks:
            p_acc += z_i * z_i + z_q * z_q
            for n in range(n_taps):
                w_acc[n] += w[n]
            count += 1
            if count == decimation:
                p_trace[block] = p_acc / decimation
                for n in range(n_taps):
                    w_trace[block, n] = w_acc[n] / decimation
                    w_acc[n] = 0j
                p_acc = 0.0
                count = 0
                block += 1
    return -1


def _smoothed_dbm(block_power_mw: RealArray, window: int) -> RealArray:
    """Trailing moving average over ``window`` blocks, in dBm."""
    if block_power_mw.size == 0:
        return block_power_mw.copy()
    cumulative = np.concatenate(([0.0], np.cumsum(block_power_mw)))
    idx = np.arange(1, block_power_mw.size + 1)
    lo = np.maximum(idx - window, 0)
    mean_mw = (cumulative[idx] - cumulative[lo]) / (idx - lo)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(mean_mw)


def adapt(
    y: ComplexSignal,
    x_ref: ComplexSignal,
    cfg: CancellerConfig,
    lms: LmsConfig,
    w0: CancellerWeights,
) -> tuple[ComplexSignal, LmsTrace]:
    """Run the closed loop over a received signal.

    Args:
        y (ComplexSignal): Receiver input (SI plus anything else received).
        x_ref (ComplexSignal): Reference (PA output), time-aligned with y.
        cfg (CancellerConfig): Canceller structure.
        lms (LmsConfig): Loop configuration.
        w0 (CancellerWeights): Initial weights; manual branches hold these values.

    Returns:
        tuple[ComplexSignal, LmsTrace]: Canceller output z and the decimated trace.

    Raises:
        ValueError: On rate/length/weight mismatches.
        LmsDivergenceError: If a weight magnitude exceeds ``lms.divergence_limit``.
    """
    if y.sample_rate_hz != x_ref.sample_rate_hz:
        raise ValueError(
            f"sample rate mismatch: y {y.sample_rate_hz} Hz vs x_ref {x_ref.sample_rate_hz} Hz"
        )
    if len(y) != len(x_ref):
        raise ValueError(f"length mismatch: y {len(y)} vs x_ref {len(x_ref)}")
    n_taps = cfg.branch_count
    if len(w0) != n_taps:
        raise ValueError(f"w0 has {len(w0)} weights for {n_taps} canceller branches")

    controls = lms.branch_controls(n_taps)
    offset_i, offset_q = _offsets(controls)
    adaptive = _adaptive_mask(controls)
    refs = np.ascontiguousarray(delayed_references(cfg, x_ref))
    w = np.array(w0.w, dtype=np.complex128)
    if cfg.amplitude_only:
        w[adaptive] = w[adaptive].real

    n_blocks = len(y) // lms.trace_decimation
    z_out = np.empty(len(y), dtype=np.complex128)
    w_trace = np.zeros((n_blocks, n_taps), dtype=np.complex128)
    p_trace = np.zeros(n_blocks, dtype=np.float64)

    diverged_at = _closed_loop_kernel(
        np.ascontiguousarray(y.samples),
        refs,
        w,
        adaptive,
        offset_i,
        offset_q,
        lms.mu * y.dt,
        leak_factor(lms, y.dt),
        cfg.amplitude_only,
        math.inf if cfg.weight_cap is None else float(cfg.weight_cap),
        lms.divergence_limit,
        lms.trace_decimation,
        z_out,
        w_trace,
        p_trace,
    )
    if diverged_at >= 0:
        t_fail = y.start_time_s + diverged_at * y.dt
        logger.error(
            f"LMS diverged at t={t_fail:.3e} s (mu={lms.mu}, limit={lms.divergence_limit})"
        )
        raise LmsDivergenceError(
            f"LMS diverged (reduce mu): |w| exceeded {lms.divergence_limit} "
            f"at t={t_fail:.3e} s with mu={lms.mu}"
        )

    trace = LmsTrace(
        times_s=y.start_time_s + np.arange(n_blocks) * lms.trace_decimation * y.dt,
        weights=w_trace,
        residual_power_dbm=_smoothed_dbm(p_trace, lms.residual_window),
        final_weights=CancellerWeights(w),
    )
    logger.debug(
        f"adapted {len(y)} samples, {n_blocks} trace blocks, final_weights={w.tolist()}"
    )
    return y.with_samples(z_out), trace


def add_soi(y_si: ComplexSignal, soi: Optional[ComplexSignal]) -> ComplexSignal:
    """Receiver input: the SI plus the signal of interest, when there is one.

    Raises:
        ValueError: If the SoI does not share the rate and length of the SI.
    """
    if soi is None:
        return y_si
    if soi.sample_rate_hz != y_si.sample_rate_hz or len(soi) != len(y_si):
        raise ValueError("soi must share the rate and length of tx")
    return y_si.with_samples(y_si.samples + soi.samples)


def run_closed_loop(
    tx: ComplexSignal,
    ch: SiChannel,
    cfg: CancellerConfig,
    lms: LmsConfig,
    w0: CancellerWeights,
    soi: Optional[ComplexSignal] = None,
    rng_seed: int = 0,
    y_si: Optional[ComplexSignal] = None,
) -> tuple[ComplexSignal, LmsTrace]:
    """Propagate the PA output through the channel and adapt the canceller on it.

    Args:
        tx (ComplexSignal): PA output, used both as the SI source and as the
            canceller reference.
        ch (SiChannel): SI channel.
        cfg (CancellerConfig): Canceller structure.
        lms (LmsConfig): Loop configuration.
        w0 (CancellerWeights): Initial weights.
        soi (ComplexSignal | None): Signal of interest added at the receiver input.
        rng_seed (int): Receiver noise seed.
        y_si (ComplexSignal | None): ``propagate(ch, tx, rng_seed)`` when the caller
            already has it; propagated here when None.

    Returns:
        tuple[ComplexSignal, LmsTrace]: Canceller output and trace.
    """
    if y_si is None:
        y_si = propagate(ch, tx, rng_seed)
    elif len(y_si) != len(tx):
        raise ValueError(f"length mismatch: y_si {len(y_si)} vs tx {len(tx)}")
    return adapt(add_soi(y_si, soi), tx, cfg, lms, w0)


def interior_slice(cfg: CancellerConfig, x_ref: ComplexSignal) -> slice:
    """Samples free of fractional-delay edge transients for every branch."""
    guard = FRACTIONAL_DELAY_TAPS + int(math.ceil(max(cfg.tap_delays_s) * x_ref.sample_rate_hz))
    return slice(guard, max(len(x_ref) - FRACTIONAL_DELAY_TAPS, guard))


def wiener_solution(
    x_ref: ComplexSignal, y: ComplexSignal, cfg: CancellerConfig
) -> CancellerWeights:
    """Least-squares canceller weights min_w ||y - sum_n w_n x(t - tau_n)||^2.

    The normal equations are solved over the interior of the record. With
    ``cfg.amplitude_only`` the weights are restricted to real values.

    Args:
        x_ref (ComplexSignal): Reference (PA output).
        y (ComplexSignal): Receiver input.
        cfg (CancellerConfig): Canceller structure.

    Returns:
        CancellerWeights: The least-squares weights.

    Raises:
        ValueError: If the record is too short, the signals mismatch, or the Gram
            matrix is singular or ill-conditioned.
    """
    if len(y) != len(x_ref) or y.sample_rate_hz != x_ref.sample_rate_hz:
        raise ValueError("x_ref and y must share rate and length")
    interior = interior_slice(cfg, x_ref)
    n_used = interior.stop - interior.start
    if n_used < WIENER_MIN_SAMPLES_PER_TAP * cfg.branch_count:
        raise ValueError(
            f"record too short for the least-squares solution: {n_used} interior samples "
            f"for {cfg.branch_count} branches"
        )

    refs = delayed_references(cfg, x_ref)[:, interior]
    target = y.samples[interior]
    gram = refs.conj() @ refs.T
    cross = refs.conj() @ target
    if cfg.amplitude_only:
        gram = gram.real
        cross = cross.real

    condition = float(np.linalg.cond(gram))
    if not condition <= WIENER_MAX_CONDITION:
        raise ValueError(
            f"ill-conditioned Gram matrix (condition number {condition:.3e})"
        )
    solution = linalg.solve(gram, cross, assume_a="her" if not cfg.amplitude_only else "sym")
    logger.debug(f"wiener solution cond={condition:.3e} w={np.round(solution, 6).tolist()}")
    return CancellerWeights(solution)


def residual_power_dbm(
    x_ref: ComplexSignal, y: ComplexSignal, cfg: CancellerConfig, w: CancellerWeights
) -> float:
    """Mean residual power over the interior when cancelling with fixed weights."""
    interior = interior_slice(cfg, x_ref)
    refs = delayed_references(cfg, x_ref)[:, interior]
    residual = y.samples[interior] - w.w @ refs
    return mw_to_dbm(float(np.mean(np.abs(residual) ** 2)))
