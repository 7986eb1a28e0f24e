"""Scenario pipeline: waveform -> PA -> channel -> canceller/LMS -> metrics -> files.

Typical usage example:
    config = resolve_scenario("circulator_20mhz")
    result = run_scenario(config)
    write_outputs(result, output_dir(config.name))
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from survey_assist_utils.logging import get_logger

from models.channel import SiChannel
from models.lms import BranchMode
from models.report import Imd3Report, ScenarioReport
from models.scenario import ScenarioConfig
from models.waveform import WaveformKind, WaveformSpec
from rf_canceller_sim.versioning import get_app_version
from utils.canceller_utils import CancellerWeights, cancel
from utils.channel_utils import preset, propagate
from utils.config_utils import resolve_scenario
from utils.lms_utils import (
    LmsTrace,
    add_soi,
    interior_slice,
    run_closed_loop,
    wiener_solution,
)
from utils.metrics_utils import cancellation_report, convergence_time, soi_fidelity
from utils.pa_utils import amplify, imd3_dbc, measure_imd3_dbc
from utils.signal_utils import WELCH_SEG_LEN, ComplexSignal, PsdEstimate, psd_welch
from utils.waveform_utils import SOI_BANDWIDTH_RATIO, generate

logger = get_logger(__name__, level="INFO")

OUT_DIR_ENV = "CANCELLER_OUT_DIR"
DEFAULT_OUT_DIR = "outputs"
CSV_FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Everything a run produces.

    Attributes:
        report (ScenarioReport): The JSON report.
        psd_tx (PsdEstimate): Steady-state PSD of the PA output.
        psd_y (PsdEstimate): Steady-state PSD of the receiver input.
        psd_z (PsdEstimate): Steady-state PSD of the canceller output.
        trace (LmsTrace): Closed-loop trace.
    """

    report: ScenarioReport
    psd_tx: PsdEstimate
    psd_y: PsdEstimate
    psd_z: PsdEstimate
    trace: LmsTrace


def derive_seeds(seed: int) -> tuple[int, int, int]:
    """Independent (waveform, SoI, receiver noise) seeds from the master seed."""
    waveform_seed, soi_seed, noise_seed = np.random.SeedSequence(seed).generate_state(3)
    return int(waveform_seed), int(soi_seed), int(noise_seed)


def resolve_channel(config: ScenarioConfig) -> SiChannel:
    """Expand a preset name and append the scenario's disturbances."""
    channel = config.channel
    base = channel if isinstance(channel, SiChannel) else preset(channel)
    if not config.disturbances:
        return base
    data = base.model_dump()
    data["events"] = [*data["events"], *(event.model_dump() for event in config.disturbances)]
    return SiChannel.model_validate(data)


def soi_waveform(config: ScenarioConfig, seed: int) -> Optional[WaveformSpec]:
    """Waveform spec of the injected SoI, None when the scenario has none."""
    if config.soi is None:
        return None
    bandwidth = config.soi.bandwidth_hz
    if bandwidth is None:
        if config.waveform.bandwidth_hz is None:
            raise ValueError("soi.bandwidth_hz is required with a two-tone transmit waveform")
        bandwidth = SOI_BANDWIDTH_RATIO * config.waveform.bandwidth_hz
    return WaveformSpec(
        kind=WaveformKind.SOI,
        bandwidth_hz=bandwidth,
        center_hz=config.soi.center_hz,
        power_dbm=config.soi.injection_power_dbm,
        duration_s=config.duration_s,
        seed=seed,
    )


def initial_weights(
    config: ScenarioConfig, x: ComplexSignal, y: ComplexSignal
) -> CancellerWeights:
    """Adaptive branches start at zero; manual branches hold their configured weight.

    A manual branch without a weight gets its entry of the least-squares solution,
    standing in for hand tuning towards the best cancellation.
    """
    controls = config.lms.branch_controls(config.canceller.branch_count)
    w0 = np.zeros(len(controls), dtype=np.complex128)
    needs_oracle = any(
        c.mode == BranchMode.MANUAL and c.manual_weight is None for c in controls
    )
    oracle = wiener_solution(x, y, config.canceller).w if needs_oracle else None
    for n, control in enumerate(controls):
        if control.mode != BranchMode.MANUAL:
            continue
        if control.manual_weight is not None:
            w0[n] = control.manual_weight.value
        elif oracle is not None:
            w0[n] = oracle[n]
    return CancellerWeights(w0)


def oracle_active_db(
    config: ScenarioConfig, x: ComplexSignal, y_si: ComplexSignal
) -> Optional[float]:
    """Active cancellation of fixed least-squares weights over the steady-state segment.

    The weights are fitted to the same segment the report measures, so this is the
    depth the canceller structure allows; the loop approaches it from above.
    Measured on the interior of the segment, away from the delay-line edges.
    """
    frac = config.steady_state_start_frac
    x_seg, y_seg = x.segment(frac), y_si.segment(frac)
    try:
        w = wiener_solution(x_seg, y_seg, config.canceller)
    except ValueError as exc:
        logger.warning(f"scenario={config.name} has no least-squares reference: {exc}")
        return None
    z_seg = cancel(config.canceller, w, y_seg, x_seg)
    interior = interior_slice(config.canceller, x_seg)
    x_in, y_in, z_in = (s.with_samples(s.samples[interior]) for s in (x_seg, y_seg, z_seg))
    return cancellation_report(x_in, y_in, z_in, config.waveform.occupied_band(), 0.0).active_db


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Run one scenario end to end.

    Args:
        config (ScenarioConfig): Validated scenario.

    Returns:
        ScenarioResult: Report, PSDs and trace.

    Raises:
        LmsDivergenceError: If the loop diverges.
        ValueError: If the scenario is numerically inconsistent.
    """
    rate = config.sample_rate_hz
    waveform_seed, soi_seed, noise_seed = derive_seeds(config.seed)
    logger.info(f"Running scenario={config.name} duration_s={config.duration_s} seed={config.seed}")

    tx_spec = config.waveform.model_copy(
        update={"duration_s": config.duration_s, "seed": waveform_seed}
    )
    x = amplify(generate(tx_spec, rate), config.pa)
    channel = resolve_channel(config)
    y_si = propagate(channel, x, noise_seed)

    soi_spec = soi_waveform(config, soi_seed)
    soi = generate(soi_spec, rate) if soi_spec is not None else None

    y = add_soi(y_si, soi)
    w0 = initial_weights(config, x, y)
    z, trace = run_closed_loop(
        x, channel, config.canceller, config.lms, w0, soi=soi, rng_seed=noise_seed, y_si=y_si
    )

    # SI bookkeeping excludes the SoI
    z_si = z if soi is None else z.with_samples(z.samples - soi.samples)
    frac = config.steady_state_start_frac
    band = config.waveform.occupied_band()
    cancellation = cancellation_report(x, y_si, z_si, band, frac)

    first_event_s = None
    reconvergence = None
    if channel.events and len(trace) and channel.events[0].time_s <= trace.times_s[-1]:
        first_event_s = channel.events[0].time_s
        reconvergence = convergence_time(trace, start_s=first_event_s)
    elif channel.events:
        logger.warning(
            f"scenario={config.name} first disturbance at {channel.events[0].time_s} s "
            f"falls outside the {config.duration_s} s record"
        )
    initial = None
    if first_event_s is None or first_event_s > trace.times_s[0]:
        initial = convergence_time(trace, end_s=first_event_s)

    fidelity = None
    if soi is not None and soi_spec is not None:
        fidelity = soi_fidelity(soi, z, soi_spec.occupied_band(), frac)

    imd3 = None
    if config.waveform.kind == WaveformKind.TWO_TONE:
        per_tone_dbm = config.waveform.power_dbm - 10.0 * math.log10(2.0)
        main_dbm, measured = measure_imd3_dbc(
            x.segment(frac), float(config.waveform.tone_spacing_hz or 0.0), config.waveform.center_hz
        )
        imd3 = Imd3Report(
            per_tone_input_dbm=per_tone_dbm,
            main_tone_dbm=main_dbm,
            measured_dbc=measured,
            oracle_dbc=imd3_dbc(config.pa, per_tone_dbm),
        )

    report = ScenarioReport(
        name=config.name,
        version=get_app_version(),
        seed=config.seed,
        cancellation=cancellation,
        convergence_time_s=initial,
        reconvergence_time_s=reconvergence,
        oracle_active_db=oracle_active_db(config, x, y_si),
        final_weights=trace.final_weights.to_models(),
        soi_fidelity=fidelity,
        imd3=imd3,
        config=config,
    )
    logger.info(
        f"scenario={config.name} intrinsic_db={cancellation.intrinsic_db:.2f} "
        f"active_db={cancellation.active_db:.2f} total_db={cancellation.total_db:.2f} "
        f"convergence_time_s={report.convergence_time_s}"
    )

    def steady_psd(signal: ComplexSignal) -> PsdEstimate:
        segment = signal.segment(frac)
        return psd_welch(segment, seg_len=min(WELCH_SEG_LEN, len(segment)))

    return ScenarioResult(
        report=report,
        psd_tx=steady_psd(x),
        psd_y=steady_psd(y),
        psd_z=steady_psd(z),
        trace=trace,
    )


def output_dir(name: str, out_root: Optional[str | Path] = None) -> Path:
    """Output directory of a scenario: --out-dir, else $CANCELLER_OUT_DIR, else outputs/."""
    root = out_root if out_root is not None else os.getenv(OUT_DIR_ENV, DEFAULT_OUT_DIR)
    return Path(root) / name


def psd_frame(psd: PsdEstimate) -> pd.DataFrame:
    """PSD as a frame with columns freq_hz, psd_dbm_per_hz."""
    return pd.DataFrame({"freq_hz": psd.freqs_hz, "psd_dbm_per_hz": psd.psd_dbm_per_hz})


def trace_frame(trace: LmsTrace) -> pd.DataFrame:
    """Trace as a frame with columns time_s, w1_i, w1_q, ..., residual_dbm."""
    columns: dict[str, np.ndarray] = {"time_s": trace.times_s}
    for n in range(trace.weights.shape[1]):
        columns[f"w{n + 1}_i"] = trace.weights[:, n].real
        columns[f"w{n + 1}_q"] = trace.weights[:, n].imag
    columns["residual_dbm"] = trace.residual_power_dbm
    return pd.DataFrame(columns)


def write_outputs(result: ScenarioResult, out_dir: Path) -> list[Path]:
    """Write the artifacts enabled in the scenario's output flags.

    Returns:
        list[Path]: Files written.
    """
    flags = result.report.config.outputs
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if flags.report:
        path = out_dir / "report.json"
        path.write_text(result.report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        written.append(path)
    if flags.psd:
        for label, psd in (("tx", result.psd_tx), ("y", result.psd_y), ("z", result.psd_z)):
            path = out_dir / f"psd_{label}.csv"
            psd_frame(psd).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            written.append(path)
    if flags.weight_trace:
        path = out_dir / "trace.csv"
        trace_frame(result.trace).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        written.append(path)

    logger.info(f"Wrote {len(written)} files to {out_dir}")
    return written


def with_overrides(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    duration_s: Optional[float] = None,
) -> ScenarioConfig:
    """Re-validated copy of a scenario with command-line overrides applied."""
    data = config.model_dump()
    if seed is not None:
        data["seed"] = seed
    if duration_s is not None:
        data["duration_s"] = duration_s
    return ScenarioConfig.model_validate(data)


def run_and_write(
    reference: str,
    out_root: Optional[str] = None,
    seed: Optional[int] = None,
    duration_s: Optional[float] = None,
) -> ScenarioReport:
    """Load, run and write one scenario (process-pool friendly)."""
    config = with_overrides(resolve_scenario(reference), seed, duration_s)
    result = run_scenario(config)
    write_outputs(result, output_dir(config.name, out_root))
    return result.report


def run_many(
    references: list[str],
    jobs: int = 1,
    out_root: Optional[str] = None,
    seed: Optional[int] = None,
    duration_s: Optional[float] = None,
) -> list[ScenarioReport]:
    """Run several scenarios, optionally in parallel worker processes.

    Every scenario has its own state and output directory, so results do not depend
    on ``jobs``.
    """
    if jobs <= 1 or len(references) <= 1:
        return [run_and_write(ref, out_root, seed, duration_s) for ref in references]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(run_and_write, ref, out_root, seed, duration_s) for ref in references
        ]
        return [future.result() for future in futures]


def sweep_bandwidths(config: ScenarioConfig, bandwidths_hz: list[float]) -> pd.DataFrame:
    """Run a scenario at several transmit bandwidths.

    Returns:
        pd.DataFrame: Columns bandwidth_hz, intrinsic_db, active_db, total_db.

    Raises:
        ValueError: For two-tone scenarios, which have no bandwidth.
    """
    if config.waveform.kind == WaveformKind.TWO_TONE:
        raise ValueError("bandwidth sweep needs a band-limited transmit waveform")
    rows = []
    for bandwidth in bandwidths_hz:
        data = config.model_dump()
        data["waveform"]["bandwidth_hz"] = bandwidth
        data["name"] = f"{config.name}_{bandwidth / 1e6:g}mhz"
        report = run_scenario(ScenarioConfig.model_validate(data)).report
        rows.append(
            {
                "bandwidth_hz": bandwidth,
                "intrinsic_db": report.cancellation.intrinsic_db,
                "active_db": report.cancellation.active_db,
                "total_db": report.cancellation.total_db,
            }
        )
    return pd.DataFrame(rows, columns=["bandwidth_hz", "intrinsic_db", "active_db", "total_db"])
