import json
import logging
from pathlib import Path

import pytest

from uhdbell.core.bell import SetupParams
from uhdbell.core.config import WORKERS_ENV, RunConfig, default_workers
from uhdbell.core.optimize import SimplexConfig
from uhdbell.core.states import StateKind
from uhdbell.core.validators import ValidationError

config_dir = Path(__file__).parent.parent / "sample/configs"


@pytest.fixture(autouse=True)
def no_workers_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)


def test_defaults():
    config = RunConfig.create()
    assert config["state"] is None
    assert config["r"] is None
    assert config.setup() == SetupParams()
    assert config.simplex() == SimplexConfig()
    assert config["init_box"] == 1.0
    assert config["max_amplitude"] == 4.0
    assert config["eta_range"] == (0.02, 1.0)
    assert config["resolution"] == 50
    assert config["format"] == "csv"
    assert config["workers"] == 1
    assert config["warm_start"] is False
    assert config["suites"] is None
    assert config["s"] == -1.0


def test_parse_command_line_strings():
    config = RunConfig.create({
        "state": "tmsv", "r": "1.2", "eta": "0.8", "restarts": "4",
        "seed": "7", "eta_range": "0.5,1", "warm_start": "true",
        "suites": "oracle,lhv"})
    assert config.state() == StateKind.create("tmsv", r=1.2)
    assert config.setup().eta_tilde == 0.8
    assert config.simplex().restarts == 4
    assert config.simplex().rng_seed == 7
    assert config["eta_range"] == (0.5, 1.0)
    assert config["warm_start"] is True
    assert config["suites"] == ["oracle", "lhv"]


def test_state_default_squeezing():
    assert RunConfig.create({"state": "tmsv"}).state().r == 0.5
    assert not RunConfig.create(
        {"state": "single-photon"}).state().has_squeezing


@pytest.mark.parametrize("values", [
    {"eta": 2},
    {"eta": 0},
    {"xi": "high"},
    {"r": -1},
    {"resolution": 1},
    {"s": 0.5},
    {"format": "xlsx"},
    {"eta_range": "1,0.5"},
    {"suites": "oracle,nothing"},
    {"state": "laser"},
    {"workers": 0},
    {"max_amplitude": 0},
])
def test_invalid_values(values):
    with pytest.raises(ValidationError):
        RunConfig.create(values)


def test_unknown_key(caplog):
    with pytest.raises(ValidationError) as e:
        RunConfig.create({"etta": 0.5})
    assert "etta" in str(e.value)

    with caplog.at_level(logging.WARNING):
        config = RunConfig.create({"etta": 0.5}, strict=False)
    assert config["eta"] == 1.0
    assert "etta" in caplog.text


def test_require():
    with pytest.raises(ValidationError) as e:
        RunConfig.create().state()
    assert str(e.value) == "'state' is required."

    with pytest.raises(ValidationError) as e:
        RunConfig.create().require("state", "r")
    assert "'r' is required." in str(e.value)

    RunConfig.create({"state": "tmsv"}).require("state", "eta")


def test_workers_from_environment(monkeypatch):
    assert default_workers() == 1

    monkeypatch.setenv(WORKERS_ENV, "3")
    assert RunConfig.create()["workers"] == 3
    assert RunConfig.create({"workers": 2})["workers"] == 2

    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ValidationError):
        default_workers()


def test_merge():
    base = RunConfig.create({"state": "tmsv", "xi": 0.9, "output": "a.csv",
                             "workers": 2, "suites": ["lhv"]})
    merged = base.merge({"xi": "0.5", "eta": None, "restarts": "8"})
    assert merged["xi"] == 0.5
    assert merged["restarts"] == 8
    assert merged["output"] == "a.csv"
    assert merged["workers"] == 2
    assert merged["suites"] == ["lhv"]
    assert base["xi"] == 0.9


def test_to_dict():
    config = RunConfig.create({"state": "tmsv", "output": "out.json",
                               "workers": 4})
    document = config.to_dict()
    assert "output" not in document
    assert "workers" not in document
    assert document["eta_range"] == [0.02, 1.0]
    json.dumps(document)

    # the dict reproduces the configuration
    assert RunConfig.create(document) == config
    assert config == config.merge({"workers": 1})


def test_from_file():
    config = RunConfig.from_file(config_dir / "single_photon.json")
    assert config.state().key() == "single-photon"
    assert config.setup() == SetupParams()

    config = RunConfig.from_file(config_dir / "sweep.json")
    assert config["pdark"] == 0.99
    assert config["warm_start"] is True
    assert config["eta_range"] == (0.02, 1.0)

    config = RunConfig.from_file(config_dir / "tmsv_threshold.json")
    assert config["tol"] == 0.001


def test_from_file_errors(tmp_path, caplog):
    path = tmp_path / "broken.json"
    path.write_text('{"state": "tmsv",')
    with pytest.raises(ValidationError):
        RunConfig.from_file(path)

    path.write_text('["tmsv"]')
    with pytest.raises(ValidationError):
        RunConfig.from_file(path)

    path.write_text('{"state": "tmsv", "comment": "baseline"}')
    with caplog.at_level(logging.WARNING):
        assert RunConfig.from_file(path)["state"] == "tmsv"
    assert "comment" in caplog.text

    with pytest.raises(OSError):
        RunConfig.from_file(tmp_path / "missing.json")
