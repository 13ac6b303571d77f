import json

import pytest

from config.config_loader import (
    ConfigLoader,
    config_hash,
    dataclass_from_dict,
    parse_override,
)
from models.agnn import ConvSpec
from utils.errors import ConfigError

SECTIONS = [
    "hodge_rnn",
    "agnn",
    "baselines",
    "datagen",
    "interpolation_experiment",
    "localization_experiment",
    "paths",
]


@pytest.fixture
def loader():
    return ConfigLoader()


def test_default_config_sections(loader):
    assert loader.get_all_sections() == SECTIONS
    assert loader.get_rnn_config()["shift"] == "hodge"
    assert loader.get_agnn_config()["k_sel"] == 5
    assert loader.get_baseline_config("convopt") == {"ridge": 1e-6}
    assert loader.get_baseline_config("kriging")["kernel_lengthscale"] is None
    assert loader.get_datagen_config()["unobserved_fraction"] == 0.1
    assert loader.get_paths_config()["results"] == "results"


def test_unknown_section(loader):
    with pytest.raises(ConfigError):
        loader.get_section("nn")


def test_env_vars_are_substituted(tmp_path, monkeypatch):
    monkeypatch.setenv("HODGEFLOW_TEST_RESULTS", "/tmp/hodgeflow-results")
    path = tmp_path / "config.yaml"
    path.write_text('paths:\n  results: "${HODGEFLOW_TEST_RESULTS}"\n  missing: "${HODGEFLOW_TEST_UNSET}"\n')
    monkeypatch.delenv("HODGEFLOW_TEST_UNSET", raising=False)
    paths = ConfigLoader(str(path)).get_paths_config()
    assert paths["results"] == "/tmp/hodgeflow-results"
    assert paths["missing"] == "${HODGEFLOW_TEST_UNSET}"


def test_config_path_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "alt.yaml"
    path.write_text("datagen:\n  k: 2\n")
    monkeypatch.setenv("HODGEFLOW_CONFIG", str(path))
    assert ConfigLoader().get_datagen_config() == {"k": 2}


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigLoader(str(tmp_path / "absent.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("hodge_rnn: [unclosed\n")
    with pytest.raises(ConfigError):
        ConfigLoader(str(bad))


def test_parse_override():
    assert parse_override("seeds=[0, 1]") == {"seeds": [0, 1]}
    assert parse_override("ridge=1e-8") == {"ridge": 1e-8}
    assert parse_override("flow_kind=gradient") == {"flow_kind": "gradient"}
    assert parse_override("graph_file=null") == {"graph_file": None}
    with pytest.raises(ConfigError):
        parse_override("seeds")
    with pytest.raises(ConfigError):
        parse_override("=3")


def test_resolve_layers_json_then_overrides(loader, tmp_path):
    layer = tmp_path / "exp.json"
    layer.write_text(json.dumps({"seeds": [7], "train_sizes": [5], "flow_kind": "gradient"}))
    resolved = loader.resolve_experiment_config(
        "interpolation_experiment", str(layer), ["seeds=[1, 2]", "methods=[\"convopt\"]"]
    )
    assert resolved["seeds"] == [1, 2]
    assert resolved["train_sizes"] == [5]
    assert resolved["flow_kind"] == "gradient"
    assert resolved["methods"] == ["convopt"]
    assert resolved["unobserved_fraction"] == 0.1


def test_resolve_rejects_unknown_keys(loader, tmp_path):
    with pytest.raises(ConfigError):
        loader.resolve_experiment_config("interpolation_experiment", overrides=["learning_rate=0.1"])
    layer = tmp_path / "exp.json"
    layer.write_text(json.dumps({"shifts": ["hodge"], "epochs": 3}))
    with pytest.raises(ConfigError):
        loader.resolve_experiment_config("localization_experiment", str(layer))


def test_resolve_rejects_bad_json_files(loader, tmp_path):
    with pytest.raises(ConfigError):
        loader.resolve_experiment_config("localization_experiment", str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        loader.resolve_experiment_config("localization_experiment", str(broken))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        loader.resolve_experiment_config("localization_experiment", str(listed))


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 12


def test_write_resolved(tmp_path):
    config = {"seeds": [0], "dataset_id": "x"}
    digest = ConfigLoader.write_resolved(config, str(tmp_path / "run"))
    written = json.loads((tmp_path / "run" / "resolved_config.json").read_text())
    assert written == config
    assert digest == config_hash(config)


def test_dataclass_from_dict_rejects_unknown_keys():
    assert dataclass_from_dict(ConvSpec, {"channels": 2}, "agnn.conv").channels == 2
    with pytest.raises(ConfigError, match="agnn.conv"):
        dataclass_from_dict(ConvSpec, {"filters": 2}, "agnn.conv")
