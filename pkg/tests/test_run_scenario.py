"""Tests for the scenario command line."""

# ruff: noqa: PLR2004

import json
from pathlib import Path

import pytest

from models.scenario import ScenarioConfig
from rf_canceller_cli import run_main
from scripts.run_scenario import EXIT_DIVERGED, EXIT_INVALID_CONFIG, EXIT_OK, main
from utils.config_utils import load_bundled_scenario
from utils.scenario_utils import OUT_DIR_ENV

SHORT = "0.001"


def _write_config(path: Path, **updates) -> Path:
    data = load_bundled_scenario("circulator_20mhz").model_dump(mode="json")
    data.update(updates)
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.mark.utils
def test_list_prints_every_scenario(capsys):
    """`list` prints one name/description line per bundled scenario."""
    assert main(["list"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 10
    assert lines[0].startswith("amplitude_only_20mhz\t")


@pytest.mark.utils
def test_preset_dump_is_a_valid_scenario(capsys):
    """`preset --dump` writes JSON that validates back to the scenario."""
    assert main(["preset", "tracking_step", "--dump"]) == EXIT_OK
    config = ScenarioConfig.model_validate_json(capsys.readouterr().out)
    assert config == load_bundled_scenario("tracking_step")


@pytest.mark.utils
def test_missing_required_field_exits_2(tmp_path: Path, capsys):
    """A scenario without sample_rate_hz names the field and exits 2."""
    path = tmp_path / "no_rate.json"
    data = load_bundled_scenario("circulator_20mhz").model_dump(mode="json")
    del data["sample_rate_hz"]
    path.write_text(json.dumps(data), encoding="utf-8")

    assert main(["run", str(path)]) == EXIT_INVALID_CONFIG
    assert "sample_rate_hz" in capsys.readouterr().err


@pytest.mark.utils
def test_bad_json_and_unknown_names_exit_2(tmp_path: Path, capsys):
    """Malformed files, missing files and unknown names are configuration errors."""
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["run", str(broken)]) == EXIT_INVALID_CONFIG
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_INVALID_CONFIG
    assert main(["preset", "no_such_scenario"]) == EXIT_INVALID_CONFIG
    assert "unknown scenario" in capsys.readouterr().err


@pytest.mark.scenario
def test_divergence_exits_3(tmp_path: Path, capsys):
    """A step size far beyond the stability bound exits 3 with a hint."""
    path = _write_config(
        tmp_path / "unstable.json",
        lms={"mu": 1e9, "integrator_dc_gain_db": 50.0},
        duration_s=2e-5,
    )
    assert main(["run", str(path), "--out-dir", str(tmp_path / "out")]) == EXIT_DIVERGED
    assert "reduce mu" in capsys.readouterr().err
    assert not (tmp_path / "out" / "circulator_20mhz" / "report.json").exists()


@pytest.mark.scenario
def test_run_writes_all_artifacts(tmp_path: Path, capsys):
    """`run` writes the report, three PSDs and the trace."""
    assert main(["run", "circulator_20mhz", "--duration", SHORT, "--out-dir", str(tmp_path)]) == EXIT_OK
    out = tmp_path / "circulator_20mhz"
    assert sorted(p.name for p in out.iterdir()) == [
        "psd_tx.csv",
        "psd_y.csv",
        "psd_z.csv",
        "report.json",
        "trace.csv",
    ]
    assert (out / "psd_z.csv").read_text(encoding="utf-8").splitlines()[0] == "freq_hz,psd_dbm_per_hz"
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["duration_s"] == pytest.approx(1e-3)
    assert set(report["cancellation"]) >= {"intrinsic_db", "active_db", "total_db"}
    assert "circulator_20mhz: intrinsic_db=" in capsys.readouterr().out


@pytest.mark.scenario
def test_run_honours_environment_out_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    """Without --out-dir the environment variable picks the output root."""
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert main(["run", "dual_antenna_20mhz", "--duration", SHORT, "--seed", "5"]) == EXIT_OK
    report = json.loads((tmp_path / "dual_antenna_20mhz" / "report.json").read_text(encoding="utf-8"))
    assert report["seed"] == 5


@pytest.mark.scenario
def test_parallel_jobs_match_serial_runs(tmp_path: Path):
    """Running two scenarios in two processes gives the same files as one at a time."""
    names = ["circulator_20mhz", "dual_antenna_20mhz"]
    assert main(["run", *names, "--duration", SHORT, "--out-dir", str(tmp_path / "serial")]) == EXIT_OK
    assert (
        main(["run", *names, "--duration", SHORT, "--jobs", "2", "--out-dir", str(tmp_path / "parallel")])
        == EXIT_OK
    )
    for name in names:
        serial = (tmp_path / "serial" / name / "report.json").read_bytes()
        parallel = (tmp_path / "parallel" / name / "report.json").read_bytes()
        assert serial == parallel


@pytest.mark.scenario
def test_sweep_writes_csv(tmp_path: Path, capsys):
    """`sweep` writes one row per bandwidth."""
    argv = [
        "sweep",
        "dual_antenna_20mhz",
        "--bandwidths",
        "20e6",
        "100e6",
        "--duration",
        SHORT,
        "--out-dir",
        str(tmp_path),
    ]
    assert main(argv) == EXIT_OK
    lines = (tmp_path / "dual_antenna_20mhz" / "sweep.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "bandwidth_hz,intrinsic_db,active_db,total_db"
    assert len(lines) == 3
    assert "active_db" in capsys.readouterr().out


@pytest.mark.utils
def test_console_entry_point_exits_with_status(monkeypatch: pytest.MonkeyPatch, capsys):
    """The installed `rf-canceller` command exits with the runner's status."""
    monkeypatch.setattr("sys.argv", ["rf-canceller", "list"])
    with pytest.raises(SystemExit) as excinfo:
        run_main()
    assert excinfo.value.code == EXIT_OK
    assert "circulator_20mhz" in capsys.readouterr().out
