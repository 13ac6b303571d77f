import dataclasses
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Type, TypeVar

import yaml
from dotenv import load_dotenv

from utils.errors import ConfigError

T = TypeVar("T")

CONFIG_HASH_LENGTH = 12


def dataclass_from_dict(cls: Type[T], values: Optional[Dict[str, Any]], section: str) -> T:
    """Build a config dataclass, rejecting keys it does not declare."""
    values = dict(values or {})
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"Unknown {section} config keys: {unknown}. Known keys: {sorted(known)}")
    return cls(**values)


def parse_override(item: str) -> Dict[str, Any]:
    """``key=value`` with the value read as a JSON literal, else kept as a string."""
    if "=" not in item:
        raise ConfigError(f"Override '{item}' is not of the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"Override '{item}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return {key: value}


def canonical_json(config: Dict[str, Any]) -> str:
    return json.dumps(config, sort_keys=True, indent=2)


def config_hash(config: Dict[str, Any]) -> str:
    digest = hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()
    return digest[:CONFIG_HASH_LENGTH]


class ConfigLoader:
    def __init__(self, config_path: str = None):
        # Load environment variables from .env file
        load_dotenv()

        if config_path is None:
            config_path = os.getenv("HODGEFLOW_CONFIG", str(Path(__file__).with_name("config.yaml")))
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        try:
            with open(self.config_path, 'r', encoding='utf-8') as file:
                config = yaml.safe_load(file) or {}

            config = self._substitute_env_vars(config)
            return config
        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
        except yaml.YAMLError as e:
            raise ConfigError(f"Error parsing YAML configuration: {e}")

    def _substitute_env_vars(self, config: Dict[str, Any]) -> Dict[str, Any]:
        if isinstance(config, dict):
            for key, value in config.items():
                if isinstance(value, str) and value.startswith("${") and value.endswith("}"):
                    env_var = value[2:-1]
                    config[key] = os.getenv(env_var, value)
                elif isinstance(value, dict):
                    config[key] = self._substitute_env_vars(value)
        return config

    def get_section(self, name: str) -> Dict[str, Any]:
        if name not in self.config:
            raise ConfigError(f"Unknown config section: {name}. Sections: {self.get_all_sections()}")
        return dict(self.config[name] or {})

    def get_rnn_config(self) -> Dict[str, Any]:
        return self.get_section("hodge_rnn")

    def get_agnn_config(self) -> Dict[str, Any]:
        return self.get_section("agnn")

    def get_baseline_config(self, method: str) -> Dict[str, Any]:
        return dict(self.get_section("baselines").get(method, {}))

    def get_datagen_config(self) -> Dict[str, Any]:
        return self.get_section("datagen")

    def get_paths_config(self) -> Dict[str, Any]:
        return self.config.get("paths", {})

    def get_all_sections(self) -> list:
        return list(self.config.keys())

    def resolve_experiment_config(self, section: str, json_path: Optional[str] = None,
                                  overrides: Iterable[str] = ()) -> Dict[str, Any]:
        """Section defaults <- JSON file <- ``key=value`` overrides.

        Keys absent from the section defaults are rejected at every layer.
        """
        resolved = self.get_section(section)

        layers = []
        if json_path:
            try:
                with open(json_path, 'r', encoding='utf-8') as f:
                    layers.append((json_path, json.load(f)))
            except FileNotFoundError:
                raise ConfigError(f"Experiment config not found: {json_path}")
            except json.JSONDecodeError as e:
                raise ConfigError(f"Experiment config {json_path} is not valid JSON: {e}")
        for item in overrides:
            layers.append(("--set", parse_override(item)))

        for origin, layer in layers:
            if not isinstance(layer, dict):
                raise ConfigError(f"{origin}: experiment config must be a JSON object")
            unknown = sorted(set(layer) - set(resolved))
            if unknown:
                raise ConfigError(
                    f"{origin}: unknown {section} keys {unknown}. Known keys: {sorted(resolved)}"
                )
            resolved.update(layer)
        return resolved

    @staticmethod
    def write_resolved(config: Dict[str, Any], output_dir: str) -> str:
        """Write ``resolved_config.json`` and return the config hash."""
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        path = Path(output_dir) / "resolved_config.json"
        with open(path, 'w', encoding='utf-8', newline="\n") as f:
            f.write(canonical_json(config) + "\n")
        return config_hash(config)
