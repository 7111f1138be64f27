"""Service configuration. Credentials never live in config files: remote
backends name an environment variable instead."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class BackendMode(str, Enum):
    SCRIPTED = "scripted"
    REMOTE = "remote"


class ConfigError(ValueError):
    pass


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8070
    backend_mode: BackendMode = BackendMode.SCRIPTED
    remote_endpoint: str | None = None
    credential_env: str | None = None
    escalation_threshold: float = 0.60
    appetite: list[str] | None = None  # None keeps the built-in registry
    pricing_input_per_million: float = 3.0
    pricing_output_per_million: float = 15.0
    corpus_path: str | None = None  # None loads the shipped fixture corpus
    data_dir: str = "./uwflow-data"
    escalated_first: bool = False

    def __post_init__(self):
        if self.backend_mode is BackendMode.REMOTE and not self.remote_endpoint:
            raise ConfigError("remote backend mode requires remote_endpoint")


def load_service_config(path: str | None) -> ServiceConfig:
    if path is None:
        return ServiceConfig()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            obj = tomllib.load(fh)
    else:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ConfigError("config must be an object")
    known = {f for f in ServiceConfig.__dataclass_fields__}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "backend_mode" in obj:
        obj["backend_mode"] = BackendMode(obj["backend_mode"])
    return ServiceConfig(**obj)
