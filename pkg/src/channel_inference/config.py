from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from channel_inference.constants import (
    CI_EPS,
    DEFAULT_DATA_DIR,
    DEFAULT_EPS,
    DEFAULT_FORMAT,
    DEFAULT_PRECISION,
    OUTPUT_FORMATS,
    QUADRATURE_STEPS,
    SETTINGS_DEFAULTS,
)

ENV_PREFIX = "CHANINF_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    eps: float = DEFAULT_EPS
    ci_eps: float = CI_EPS
    precision: int = DEFAULT_PRECISION
    output_format: str = DEFAULT_FORMAT
    quadrature_steps: int = QUADRATURE_STEPS
    log_level: str = "WARNING"
    api_host: str = "127.0.0.1"
    api_port: int = 8090
    api_token: str | None = None
    data_dir: Path = Path(DEFAULT_DATA_DIR)

    def with_overrides(
        self,
        *,
        eps: float | None = None,
        ci_eps: float | None = None,
        output_format: str | None = None,
        precision: int | None = None,
    ) -> Settings:
        updates: dict[str, object] = {}
        if eps is not None:
            updates["eps"] = eps
        if ci_eps is not None:
            updates["ci_eps"] = ci_eps
        if output_format is not None:
            updates["output_format"] = output_format
        if precision is not None:
            updates["precision"] = precision
        return replace(self, **updates)


def read_env_file(path: Path) -> dict[str, str]:
    """CHANINF_* assignments of a dotenv file. Other keys, comments and malformed lines are skipped."""
    if not path.is_file():
        return {}
    values: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8", errors="replace").splitlines():
        raw = line.strip().removeprefix("export ").strip()
        if not raw or raw.startswith("#") or "=" not in raw:
            continue
        key, value = (part.strip() for part in raw.split("=", maxsplit=1))
        if key.startswith(ENV_PREFIX):
            values[key] = value.strip('"').strip("'")
    return values


def _load_env_file(path: Path) -> None:
    for key, value in read_env_file(path).items():
        os.environ.setdefault(key, value)


def _env_float(key: str) -> float:
    default = float(SETTINGS_DEFAULTS[key])
    try:
        value = float(os.getenv(key, str(default)))
    except ValueError:
        return default
    return value if value > 0 else default


def _env_int(key: str) -> int:
    default = int(SETTINGS_DEFAULTS[key])
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        return default


def load_settings(env_file: Path | None = None) -> Settings:
    _load_env_file(env_file or Path(".env"))

    output_format = os.getenv("CHANINF_FORMAT", DEFAULT_FORMAT).strip().lower()
    if output_format not in OUTPUT_FORMATS:
        output_format = DEFAULT_FORMAT

    steps = _env_int("CHANINF_QUADRATURE_STEPS")
    if steps < 2 or steps % 2:
        steps = QUADRATURE_STEPS

    log_level = os.getenv("CHANINF_LOG_LEVEL", "WARNING").strip().upper()
    if log_level not in LOG_LEVELS:
        log_level = "WARNING"

    precision = _env_int("CHANINF_PRECISION")
    if precision < 0:
        precision = DEFAULT_PRECISION

    return Settings(
        eps=_env_float("CHANINF_EPS"),
        ci_eps=_env_float("CHANINF_CI_EPS"),
        precision=precision,
        output_format=output_format,
        quadrature_steps=steps,
        log_level=log_level,
        api_host=os.getenv("CHANINF_API_HOST", "127.0.0.1"),
        api_port=_env_int("CHANINF_API_PORT"),
        api_token=os.getenv("CHANINF_API_TOKEN") or None,
        data_dir=Path(os.getenv("CHANINF_DATA_DIR") or DEFAULT_DATA_DIR),
    )
