import os
from collections.abc import Mapping
from pathlib import Path

import yaml
from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

REPO_ROOT = Path(__file__).resolve().parents[2]
CONFIG_PATH = REPO_ROOT / "sextic" / "config.yaml"
ENV_PREFIX = "SEXTIC_"


class Settings(BaseModel):
    max_group_order: int = Field(4096, gt=0)
    max_work: int = Field(2_000_000, gt=0)
    max_isometry_rank: int = Field(8, gt=0)
    debug_full_root_check: bool = False
    seed: int = 20240601
    jobs: int = Field(1, ge=1)
    events_path: str | None = "logs/sextic_events.jsonl"

    model_config = {"frozen": True}

    def events_file(self) -> Path | None:
        if not self.events_path:
            return None
        path = Path(self.events_path)
        return path if path.is_absolute() else REPO_ROOT / path


def read_yaml(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"Missing file: {path}")
    with path.open("r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path.name} must contain a top-level mapping")
    return data


def _env_value(raw: str, default) -> object:
    if isinstance(default, bool):
        return raw.strip().lower() in {"1", "true", "yes", "on"}
    if raw.strip().lower() in {"", "none", "null"} and not isinstance(default, int):
        return None
    return raw


def env_overrides(env: Mapping[str, str] | None = None) -> dict:
    env = os.environ if env is None else env
    found = {}
    for name, field in Settings.model_fields.items():
        key = ENV_PREFIX + name.upper()
        if key in env:
            found[name] = _env_value(env[key], field.default)
    return found


def load_settings(
    path: Path | None = None,
    env: Mapping[str, str] | None = None,
    **overrides,
) -> Settings:
    """YAML defaults, then SEXTIC_* environment, then explicit overrides (CLI flags)."""
    data = read_yaml(path or CONFIG_PATH)
    data.update(env_overrides(env))
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**data)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {exc.errors()[0]['msg']}") from exc
