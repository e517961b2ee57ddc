"""Named experiment presets shipped as package data."""

from __future__ import annotations

from importlib import resources

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .config import ExperimentConfig, parse_config
from .errors import ConfigError


def available():
    root = resources.files("arks") / "presets"
    return sorted(p.name[: -len(".toml")] for p in root.iterdir() if p.name.endswith(".toml"))


def text(name: str) -> str:
    root = resources.files("arks") / "presets"
    path = root / f"{name}.toml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {available()}")
    return path.read_text()


def load(name: str) -> ExperimentConfig:
    return parse_config(tomllib.loads(text(name)))
