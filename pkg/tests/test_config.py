from __future__ import annotations

import os
from pathlib import Path

import pytest

from channel_inference.config import Settings, load_settings, read_env_file
from channel_inference.constants import CI_EPS, DEFAULT_EPS, DEFAULT_PRECISION, QUADRATURE_STEPS


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    clean = {key: value for key, value in os.environ.items() if not key.startswith("CHANINF_")}
    monkeypatch.setattr(os, "environ", clean)


def test_defaults_without_env(tmp_path: Path) -> None:
    settings = load_settings(tmp_path / "missing.env")
    assert settings.eps == DEFAULT_EPS
    assert settings.ci_eps == CI_EPS
    assert settings.precision == DEFAULT_PRECISION
    assert settings.output_format == "ket"
    assert settings.quadrature_steps == QUADRATURE_STEPS
    assert settings.log_level == "WARNING"
    assert settings.api_token is None
    assert settings.data_dir == Path("data")


def test_env_file_is_loaded(tmp_path: Path) -> None:
    env = tmp_path / ".env"
    env.write_text(
        "# local overrides\n"
        "CHANINF_PRECISION=5\n"
        "CHANINF_FORMAT='json'\n"
        'CHANINF_API_TOKEN="secret"\n'
        "not a setting\n"
    )
    settings = load_settings(env)
    assert settings.precision == 5
    assert settings.output_format == "json"
    assert settings.api_token == "secret"


def test_env_file_does_not_override_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    env = tmp_path / ".env"
    env.write_text("CHANINF_PRECISION=5\n")
    monkeypatch.setenv("CHANINF_PRECISION", "2")
    assert load_settings(env).precision == 2


@pytest.mark.parametrize(
    ("key", "value", "attr", "expected"),
    [
        ("CHANINF_EPS", "abc", "eps", DEFAULT_EPS),
        ("CHANINF_EPS", "-1", "eps", DEFAULT_EPS),
        ("CHANINF_CI_EPS", "0", "ci_eps", CI_EPS),
        ("CHANINF_PRECISION", "-3", "precision", DEFAULT_PRECISION),
        ("CHANINF_FORMAT", "yaml", "output_format", "ket"),
        ("CHANINF_QUADRATURE_STEPS", "7", "quadrature_steps", QUADRATURE_STEPS),
        ("CHANINF_LOG_LEVEL", "loud", "log_level", "WARNING"),
    ],
)
def test_invalid_values_fall_back(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, key: str, value: str, attr: str, expected: object
) -> None:
    monkeypatch.setenv(key, value)
    assert getattr(load_settings(tmp_path / "missing.env"), attr) == expected


def test_valid_values_are_used(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("CHANINF_EPS", "1e-6")
    monkeypatch.setenv("CHANINF_QUADRATURE_STEPS", "256")
    monkeypatch.setenv("CHANINF_LOG_LEVEL", "debug")
    monkeypatch.setenv("CHANINF_API_PORT", "9000")
    settings = load_settings(tmp_path / "missing.env")
    assert settings.eps == 1e-6
    assert settings.quadrature_steps == 256
    assert settings.log_level == "DEBUG"
    assert settings.api_port == 9000


def test_data_dir_from_env(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("CHANINF_DATA_DIR", str(tmp_path))
    assert load_settings(tmp_path / "missing.env").data_dir == tmp_path


def test_read_env_file_keeps_only_prefixed_keys(tmp_path: Path) -> None:
    env = tmp_path / ".env"
    env.write_text(
        "export CHANINF_EPS = 1e-6\n"
        "HOME=/nowhere\n"
        "  # CHANINF_PRECISION=9\n"
        "CHANINF_DATA_DIR='/srv/tables'\n"
        "CHANINF_API_TOKEN=a=b\n"
        "\n",
        encoding="utf-8",
    )
    assert read_env_file(env) == {
        "CHANINF_EPS": "1e-6",
        "CHANINF_DATA_DIR": "/srv/tables",
        "CHANINF_API_TOKEN": "a=b",
    }
    assert read_env_file(tmp_path / "missing.env") == {}


def test_with_overrides_keeps_other_fields() -> None:
    base = Settings(api_token="t")
    updated = base.with_overrides(precision=6, output_format="json")
    assert updated.precision == 6
    assert updated.output_format == "json"
    assert updated.eps == base.eps
    assert updated.api_token == "t"
    assert base.with_overrides() == base
