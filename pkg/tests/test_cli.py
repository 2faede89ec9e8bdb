import json
import os

import pytest

from spinwitness import cli, runio
from spinwitness.errors import ValidationError
from spinwitness.experiments import (
    DistanceRecord,
    NoiseRecord,
    ScanConfig,
    SizeRecord,
)


def test_parse_config_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    assert runio.parse_config(path) == ScanConfig()


def test_parse_config_values_and_sections(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "[scan]\nn = 4\nspacing = 6.5\n# comment\nseed = 99\nreps = 25\n"
    )
    cfg = runio.parse_config(path)
    assert cfg.n == 4
    assert cfg.spacing == 6.5
    assert cfg.base_seed == 99
    assert cfg.repetitions == 25


def test_parse_config_unknown_key_named(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("coupling = 1.0\n")
    with pytest.raises(ValidationError, match="coupling"):
        runio.parse_config(path)


def test_parse_config_type_error_has_line_number(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("n = 3\nspacing = wide\n")
    with pytest.raises(ValidationError, match=":2:"):
        runio.parse_config(path)


def test_config_dump_parse_round_trip(tmp_path):
    cfg = ScanConfig(n=5, spacing=5.125, kappa=0.061, base_seed=7)
    path = tmp_path / "dump.cfg"
    runio.dump_config(cfg, path)
    assert runio.parse_config(path) == cfg


def test_csv_round_trip_distance(tmp_path):
    records = [
        DistanceRecord(5.125, 2.0744049, 1.35635160, -4.12789485),
        DistanceRecord(6.0, 1.93828778, 1.33716546, -3.63044905),
    ]
    path = tmp_path / "distance.csv"
    entry = runio.write_csv(records, path)
    assert entry["rows"] == 2 and len(entry["sha256"]) == 64
    assert runio.read_csv(path) == records
    header = path.read_text().splitlines()[0]
    assert header == "r_angstrom,amplitude,lambda,excited_energy_ghz,status"


def test_csv_round_trip_noise(tmp_path):
    records = [NoiseRecord(0.0, 0.5, 1.9, 0.1, 1.3, 0.05, 100, 2, "ok")]
    path = tmp_path / "noise.csv"
    runio.write_csv(records, path)
    assert runio.read_csv(path) == records


def test_csv_rejects_mixed_and_empty(tmp_path):
    with pytest.raises(ValidationError):
        runio.write_csv([], tmp_path / "x.csv")
    with pytest.raises(ValidationError):
        runio.write_csv(
            [DistanceRecord(5.0), SizeRecord(3, True)], tmp_path / "x.csv"
        )


def test_header_only_csv(tmp_path):
    path = tmp_path / "empty.csv"
    entry = runio.write_header_only(SizeRecord, path)
    assert entry["rows"] == 0
    assert path.read_text() == "n,interacting,amplitude,lambda,status\n"


def test_checksums_stable_across_runs(tmp_path):
    records = [SizeRecord(3, True, 2.07, 1.36)]
    e1 = runio.write_csv(records, tmp_path / "a.csv")
    e2 = runio.write_csv(records, tmp_path / "b.csv")
    assert e1["sha256"] == e2["sha256"]


def test_cli_scan_distance_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    code = cli.cli_dispatch(
        [
            "scan-distance",
            "--n",
            "3",
            "--r-min",
            "5.125",
            "--r-max",
            "5.125",
            "--r-step",
            "1.0",
            "--out-dir",
            str(out),
        ]
    )
    assert code == 0
    records = runio.read_csv(out / "distance.csv")
    assert len(records) == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outputs"][0]["path"] == "distance.csv"
    assert manifest["config"]["n"] == 3
    assert "n" in manifest["flag_overrides"]


def test_cli_single_matches_distance_row(tmp_path, capsys):
    out = tmp_path / "run"
    assert (
        cli.cli_dispatch(
            [
                "scan-distance",
                "--n",
                "3",
                "--r-min",
                "5.125",
                "--r-max",
                "5.125",
                "--r-step",
                "1.0",
                "--out-dir",
                str(out),
            ]
        )
        == 0
    )
    row = runio.read_csv(out / "distance.csv")[0]
    capsys.readouterr()
    assert cli.cli_dispatch(["single", "--n", "3", "--spacing", "5.125"]) == 0
    printed = capsys.readouterr().out
    assert f"{row.amplitude:.12g}" in printed
    assert f"{row.lam:.12g}" in printed


def test_cli_seed_byte_identical_csvs(tmp_path):
    args = [
        "noise-map",
        "--n",
        "2",
        "--reps",
        "3",
        "--seed",
        "5",
    ]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    cfgfile = tmp_path / "noise.cfg"
    cfgfile.write_text("sigma_d_steps = 2\nsigma_r_steps = 2\n")
    for out in (out1, out2):
        code = cli.cli_dispatch(
            args + ["--config", str(cfgfile), "--out-dir", str(out)]
        )
        assert code == 0
    assert (out1 / "noise.csv").read_bytes() == (out2 / "noise.csv").read_bytes()


def test_cli_flag_overrides_config_file(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("n = 2\n")
    out = tmp_path / "out"
    code = cli.cli_dispatch(
        [
            "scan-distance",
            "--config",
            str(cfgfile),
            "--n",
            "3",
            "--r-min",
            "5.0",
            "--r-max",
            "5.0",
            "--r-step",
            "1.0",
            "--out-dir",
            str(out),
        ]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["n"] == 3


def test_cli_fit_square_root(tmp_path, capsys):
    path = tmp_path / "points.csv"
    path.write_text("x,y\n1,1\n4,2\n9,3\n")
    assert cli.cli_dispatch(["fit", str(path)]) == 0
    printed = capsys.readouterr().out
    assert "b = 0.5" in printed


def test_cli_unknown_subcommand_exit_1(capsys):
    assert cli.cli_dispatch(["frobnicate"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()


def test_cli_missing_config_file_exit_1(capsys):
    assert cli.cli_dispatch(["single", "--config", "/nonexistent.cfg"]) == 1


def test_cli_threads_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "not-a-number")
    assert cli.cli_dispatch(["single", "--n", "2"]) == 1
    monkeypatch.setenv(cli.THREADS_ENV, "2")
    capsys.readouterr()
    assert cli.cli_dispatch(["single", "--n", "2"]) == 0


def test_emit_plot_deterministic(tmp_path):
    from spinwitness import plots

    records = [
        DistanceRecord(5.0, 2.1, 1.36, -4.2),
        DistanceRecord(5.5, 2.0, 1.35, -3.9),
        DistanceRecord(6.0, 1.9, 1.34, -3.6),
    ]
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    plots.emit_plot(records, "distance", p1)
    plots.emit_plot(records, "distance", p2)
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    assert b"<svg" in data
    with pytest.raises(ValidationError):
        plots.emit_plot(records, "pie-chart", tmp_path / "c.svg")
    with pytest.raises(ValidationError):
        plots.emit_plot([], "distance", tmp_path / "d.svg")
