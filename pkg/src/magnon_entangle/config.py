"""Configuration: JSON files, command-line overrides and environment fallbacks."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from magnon_entangle.errors import ConfigError
from magnon_entangle.model import MaterialSpec, SystemParams
from magnon_entangle.sweep import QUANTITIES, Axis, Binding, SweepJob

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class JobSection(BaseModel):
    """The ``job`` block of a config file: a sweep without its base parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x: Axis
    y: Axis
    binding: Binding = "none"
    inner_scan: Axis | None = None
    quantities: tuple[str, ...] = QUANTITIES

    def to_job(self, base: SystemParams) -> SweepJob:
        try:
            return SweepJob(base=base, **self.model_dump())
        except ValidationError as exc:
            raise ConfigError(f"invalid job: {exc}") from exc


class Config(BaseModel):
    """Top-level configuration. Unknown keys are rejected at every level."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    params: SystemParams = Field(default_factory=SystemParams)
    material: MaterialSpec = Field(default_factory=MaterialSpec)
    job: JobSection | None = None


def load_config(
    path: Path | None = None, overrides: dict[str, float | None] | None = None
) -> Config:
    """Defaults, then the JSON file at ``path``, then non-``None`` ``overrides``."""
    data: dict[str, object] = {}
    if path is not None:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        logger.debug("loaded config from %s", path)

    try:
        config = Config.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc

    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    if flags:
        config = config.model_copy(
            update={"params": config.params.with_overrides(**flags)}
        )
    return config


def resolve_log_level(flag: str | None) -> str:
    """``--log-level``, else ``MAGNON_ENTANGLE_LOG_LEVEL``, else WARNING."""
    level = (flag or os.environ.get("MAGNON_ENTANGLE_LOG_LEVEL") or "WARNING").upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"log level {level!r} not in {LOG_LEVELS}")
    return level
