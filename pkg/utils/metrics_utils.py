"""Cancellation, convergence and signal-of-interest metrics.

All powers are band-integrated Welch estimates over the steady-state tail of the
record, the way a spectrum analyser reading of a settled canceller would be taken.
"""

import math
from typing import Optional

import numpy as np
from survey_assist_utils.logging import get_logger

from models.report import CancellationReport, SoiFidelity
from utils.app_types import Band
from utils.lms_utils import LmsTrace
from utils.signal_utils import ComplexSignal, band_filter, power_dbm, validate_band

logger = get_logger(__name__, level="INFO")

# dB values are multiples of 2^-20 dB, so sums of two of them are exact
DB_QUANTUM = 2.0**-20
SETTLED_TAIL_FRAC = 0.2


def quantise_db(value_db: float) -> float:
    """Round a dB value to the report grid, leaving infinities untouched."""
    if not math.isfinite(value_db):
        return value_db
    return round(value_db / DB_QUANTUM) * DB_QUANTUM


def _check_rates(*signals: ComplexSignal) -> None:
    rates = {s.sample_rate_hz for s in signals}
    if len(rates) != 1:
        raise ValueError(f"sample rate mismatch: {sorted(rates)}")


def cancellation_report(
    tx: ComplexSignal,
    y: ComplexSignal,
    z: ComplexSignal,
    band: Band,
    steady_start_frac: float = 0.5,
) -> CancellationReport:
    """Measure intrinsic isolation, active cancellation and their total.

    Args:
        tx (ComplexSignal): PA output.
        y (ComplexSignal): SI at the receiver input.
        z (ComplexSignal): SI after cancellation.
        band (Band): Measurement band in Hz.
        steady_start_frac (float): Fraction of the record skipped before measuring.

    Returns:
        CancellationReport: The three powers and the dB split.

    Raises:
        ValueError: On rate mismatch or a band outside Nyquist.
    """
    _check_rates(tx, y, z)
    validate_band(band, tx.sample_rate_hz)

    p_tx = quantise_db(power_dbm(tx.segment(steady_start_frac), band))
    p_y = quantise_db(power_dbm(y.segment(steady_start_frac), band))
    p_z = quantise_db(power_dbm(z.segment(steady_start_frac), band))
    intrinsic = quantise_db(p_tx - p_y)
    active = quantise_db(p_y - p_z)
    return CancellationReport(
        band_hz=[float(band[0]), float(band[1])],
        p_tx_dbm=p_tx,
        p_y_dbm=p_y,
        p_z_dbm=p_z,
        intrinsic_db=intrinsic,
        active_db=active,
        total_db=intrinsic + active,
    )


def convergence_time(
    trace: LmsTrace,
    settle_margin_db: float = 3.0,
    start_s: Optional[float] = None,
    end_s: Optional[float] = None,
) -> Optional[float]:
    """Time after which the residual power stays near its settled level.

    The settled level is the median residual over the final 20% of the trace points
    between ``start_s`` and ``end_s``.

    Args:
        trace (LmsTrace): Closed-loop trace.
        settle_margin_db (float): Allowed deviation from the settled level.
        start_s (float | None): Measure from this time, e.g. a disturbance event.
            Defaults to the first trace point.
        end_s (float | None): Ignore trace points from this time on, e.g. the first
            disturbance when measuring the initial convergence.

    Returns:
        float | None: Seconds from the start until the residual stays within the
            margin; None if the last point is still outside it (not converged).

    Raises:
        ValueError: If no trace points fall between ``start_s`` and ``end_s``.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    times = trace.times_s
    residual = trace.residual_power_dbm
    start = float(times[0]) if start_s is None else float(start_s)
    keep = times >= start
    if end_s is not None:
        keep &= times < end_s
    times, residual = times[keep], residual[keep]
    if times.size == 0:
        raise ValueError(f"no trace points between start_s={start_s} and end_s={end_s}")

    tail = residual[int(math.floor((1.0 - SETTLED_TAIL_FRAC) * residual.size)) :]
    settled = float(np.median(tail))
    with np.errstate(invalid="ignore"):
        outside = np.abs(residual - settled) > settle_margin_db
    if outside[-1]:
        return None
    if not outside.any():
        return float(times[0] - start)
    first_settled = int(np.flatnonzero(outside)[-1]) + 1
    return float(times[first_settled] - start)


def soi_fidelity(
    soi_in: ComplexSignal,
    z: ComplexSignal,
    soi_band: Band,
    steady_start_frac: float = 0.5,
) -> SoiFidelity:
    """Compare the canceller output with the injected signal of interest.

    Both signals are restricted to the SoI band; the EVM is taken after the
    least-squares complex gain that maps the SoI onto the output, so a linear
    rotation or scaling of the SoI does not count as distortion.

    Args:
        soi_in (ComplexSignal): Injected SoI.
        z (ComplexSignal): Canceller output.
        soi_band (Band): SoI band in Hz.
        steady_start_frac (float): Fraction of the record skipped before measuring.

    Returns:
        SoiFidelity: Power delta and EVM (-inf when z equals the SoI).
    """
    _check_rates(soi_in, z)
    if len(soi_in) != len(z):
        raise ValueError(f"length mismatch: soi {len(soi_in)} vs z {len(z)}")
    validate_band(soi_band, z.sample_rate_hz)

    soi_seg = soi_in.segment(steady_start_frac)
    z_seg = z.segment(steady_start_frac)
    power_delta = power_dbm(z_seg, soi_band) - power_dbm(soi_seg, soi_band)

    reference = band_filter(soi_seg, soi_band).samples
    received = band_filter(z_seg, soi_band).samples
    ref_energy = np.vdot(reference, reference)
    if ref_energy == 0:
        raise ValueError("SoI has no energy in the SoI band")
    gain = np.vdot(reference, received) / ref_energy
    error = received - gain * reference
    error_energy = float(np.vdot(error, error).real)
    aligned_energy = float((abs(gain) ** 2) * ref_energy.real)
    if error_energy == 0.0:
        evm_db = -math.inf
    elif aligned_energy == 0.0:
        evm_db = math.inf
    else:
        evm_db = 10.0 * math.log10(error_energy / aligned_energy)

    logger.debug(f"soi_fidelity power_delta_db={power_delta:.3f} evm_db={evm_db:.2f}")
    return SoiFidelity(
        band_hz=[float(soi_band[0]), float(soi_band[1])],
        power_delta_db=power_delta,
        evm_db=evm_db,
    )
