import json
from pathlib import Path

import pytest

from uhdbell import __version__
from uhdbell.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, run
from uhdbell.core.config import WORKERS_ENV

sample_dir = Path(__file__).parent.parent / "sample"
counts_csv = str(sample_dir / "datafiles/counts.csv")


@pytest.fixture(autouse=True)
def no_workers_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)


def test_version(capsys):
    assert run(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_usage_error():
    assert run(["ch-optimize", "--no-such-option"]) == EXIT_USAGE
    assert run(["plot"]) == EXIT_USAGE


def test_visibility(capsys):
    assert run(["visibility", "--from-xi", "0.5"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(2.0 / 3.0)

    assert run(["visibility", "--from-visibility", "1"]) == EXIT_OK
    assert float(capsys.readouterr().out) == 1.0

    assert run(["visibility", "--from-xi", "0"]) == EXIT_DOMAIN


def test_pi_s(capsys):
    assert run(["pi-s", counts_csv]) == EXIT_OK
    assert float(capsys.readouterr().out) == 0.45

    assert run(["pi-s", counts_csv, "--s=0"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(0.2)


def test_pi_s_errors(tmp_path):
    assert run(["pi-s", counts_csv, "--s=0.5"]) == EXIT_USAGE
    assert run(["pi-s", str(tmp_path / "missing.csv")]) == EXIT_USAGE

    path = tmp_path / "negative.csv"
    path.write_text("n,p\n0,1.5\n1,-0.5\n")
    assert run(["pi-s", str(path)]) == EXIT_DOMAIN


def test_configuration_errors():
    # the state is required
    assert run(["ch-optimize"]) == EXIT_USAGE
    assert run(["ch-optimize", "--state", "single-photon",
                "--eta", "2"]) == EXIT_USAGE
    assert run(["ch-optimize", "--state", "laser"]) == EXIT_USAGE
    assert run(["sweep", "--state", "tmsv", "--resolution", "1"]) == \
        EXIT_USAGE


def test_ch_optimize(capsys):
    assert run(["ch-optimize", "--state", "single-photon",
                "--restarts", "6"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["value"] > 0.1
    assert document["violation"] is True
    assert document["ch"] == pytest.approx(-1.0 - document["value"])
    assert document["settings"]["im_a1"] == 0.0
    assert document["config"]["restarts"] == 6
    assert document["config"]["max_amplitude"] == 4.0
    assert "workers" not in document["config"]


def test_ch_optimize_fixed_squeezing(tmp_path):
    output = tmp_path / "tmsv.json"
    assert run(["ch-optimize", "--state", "tmsv", "--r", "0.8",
                "--restarts", "2", "-o", str(output)]) == EXIT_OK
    document = json.loads(output.read_text())
    assert document["state"] == {"state": "tmsv", "r": 0.8}
    assert document["settings"]["r"] == 0.8


def test_config_file_with_overrides(tmp_path):
    output = tmp_path / "low.json"
    assert run(["ch-optimize",
                "-c", str(sample_dir / "configs/single_photon.json"),
                "--eta", "0.5", "--restarts", "4",
                "--output", str(output)]) == EXIT_OK
    document = json.loads(output.read_text())
    assert document["config"]["state"] == "single-photon"
    assert document["config"]["eta"] == 0.5
    assert document["setup"]["eta_tilde"] == 0.5
    assert document["value"] <= 0.0


def test_sweep(tmp_path):
    args = ["sweep", "--state", "single-photon", "--resolution", "3",
            "--eta-range", "0.6,1", "--xi-range", "0.8,1",
            "--restarts", "2"]
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    assert run(args + ["-o", str(first)]) == EXIT_OK
    assert run(args + ["-o", str(second), "-w", "2"]) == EXIT_OK

    lines = first.read_text().splitlines()
    assert lines[0].startswith("# {")
    assert lines[1].startswith("eta,xi,ch,")
    assert len(lines) == 2 + 9
    assert first.read_bytes() == second.read_bytes()

    header = json.loads(lines[0][2:])
    assert header["resolution"] == 3
    assert header["eta_range"] == [0.6, 1.0]


def test_sweep_json_to_stdout(capsys):
    assert run(["sweep", "--state", "single-photon", "--resolution", "2",
                "--eta-range", "0.9,1", "--xi-range", "0.9,1",
                "--restarts", "2", "--format", "json", "-o", "-"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["ch"]) == 2
    assert document["config"]["format"] == "json"


def test_threshold_without_sign_change():
    assert run(["threshold", "--state", "single-photon", "--xi", "0.2",
                "--restarts", "4"]) == EXIT_DOMAIN


def test_verify(capsys):
    assert run(["verify", "--suite", "factorization"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["passed"] is True
    assert [s["suite"] for s in document["suites"]] == ["factorization"]

    assert run(["verify", "--suite", "nothing"]) == EXIT_USAGE


@pytest.mark.slow
def test_threshold(capsys):
    assert run(["threshold", "--state", "single-photon"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["eta_threshold"] == pytest.approx(0.84, abs=0.01)
    assert document["config"]["tol"] == 0.001


@pytest.mark.slow
def test_verify_all_suites(capsys):
    assert run(["verify"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["suites"]) == 5
