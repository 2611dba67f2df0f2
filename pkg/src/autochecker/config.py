"""Run configuration.

Config files are JSON with a ``"version": "1"`` field.  Every key is
optional; missing ones take the defaults below.  Relative paths are resolved
against the directory holding the config file.  A ``paths`` entry left as
``null`` means the copy shipped inside the package.

Credentials never live here: the HTTP clients read ``AUTOCHECKER_API_KEY``
from the environment.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError

CONFIG_VERSION = "1"
RULE_DIR_PLACEHOLDER = "{rule_dir}"

DEFAULTS: dict[str, Any] = {
    "version": CONFIG_VERSION,
    "llm": {
        "mode": "scripted",
        "endpoint": None,
        "model": None,
        "transcript_path": "{rule_dir}/transcript.jsonl",
    },
    "embedder": {"mode": "lexical", "endpoint": None, "model": None},
    "thresholds": {"meta": 0.85, "full": 0.80},
    "tdcd": {"max_retry_times": 5, "round_cap_factor": 3, "feedback_in_retry": False},
    "paths": {"db_dir": "autochecker-db", "template": None, "manifest": None, "metaops": None, "snippets": None},
}

_SECRET_KEYS = {"api_key", "apikey", "key", "token", "password", "secret"}

_PACKAGED = {
    "template": "template.check",
    "manifest": "reference_manifest.jsonl",
    "metaops": "metaops.jsonl",
    "snippets": "snippets.jsonl",
}


def packaged_path(name: str) -> Path:
    return Path(str(resources.files("autochecker").joinpath("data", name)))


@dataclass
class Config:
    data: dict
    base_dir: Path

    def section(self, name: str) -> dict:
        return self.data[name]

    def path(self, key: str) -> Optional[Path]:
        value = self.data["paths"].get(key)
        if value is None:
            return packaged_path(_PACKAGED[key]) if key in _PACKAGED else None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    def transcript_for(self, rule_dir: Optional[Path]) -> Path:
        raw = self.data["llm"]["transcript_path"]
        if RULE_DIR_PLACEHOLDER in raw:
            if rule_dir is None:
                raise ConfigError("transcript path refers to {rule_dir} but no rule directory was given")
            return Path(raw.replace(RULE_DIR_PLACEHOLDER, str(rule_dir)))
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p

    def to_json(self) -> dict:
        return copy.deepcopy(self.data)


def _merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where}{key!r} must be an object")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def _find_secrets(node, where=""):
    if isinstance(node, dict):
        for k, v in node.items():
            if k.lower() in _SECRET_KEYS:
                yield where + k
            yield from _find_secrets(v, f"{where}{k}.")


def validate(data: dict) -> None:
    if data.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION!r}, got {data.get('version')!r}")
    llm = data["llm"]
    if llm["mode"] not in ("http", "scripted"):
        raise ConfigError(f"llm.mode must be http or scripted, got {llm['mode']!r}")
    if llm["mode"] == "scripted" and not llm["transcript_path"]:
        raise ConfigError("scripted llm mode needs llm.transcript_path")
    if llm["mode"] == "http" and not llm["endpoint"]:
        raise ConfigError("http llm mode needs llm.endpoint")
    emb = data["embedder"]
    if emb["mode"] not in ("http", "lexical"):
        raise ConfigError(f"embedder.mode must be http or lexical, got {emb['mode']!r}")
    if emb["mode"] == "http" and not emb["endpoint"]:
        raise ConfigError("http embedder mode needs embedder.endpoint")
    for key in ("meta", "full"):
        value = data["thresholds"][key]
        if not isinstance(value, (int, float)) or not 0 < value <= 1:
            raise ConfigError(f"thresholds.{key} must be in (0, 1]")
    tdcd = data["tdcd"]
    for key in ("max_retry_times", "round_cap_factor"):
        if not isinstance(tdcd[key], int) or isinstance(tdcd[key], bool) or tdcd[key] < 1:
            raise ConfigError(f"tdcd.{key} must be a positive integer")
    if not isinstance(tdcd["feedback_in_retry"], bool):
        raise ConfigError("tdcd.feedback_in_retry must be true or false")


def load_config(path: str | Path | None = None, overrides: Optional[dict] = None) -> Config:
    """Defaults, then the file (if any), then ``overrides`` from the command line."""
    data = copy.deepcopy(DEFAULTS)
    base_dir = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if "version" not in raw:
            raise ConfigError(f"config {path} has no \"version\" field")
        secrets = list(_find_secrets(raw))
        if secrets:
            raise ConfigError(
                f"config must not hold credentials ({', '.join(secrets)}); use AUTOCHECKER_API_KEY"
            )
        data = _merge(data, raw)
        base_dir = path.resolve().parent
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, key = dotted.split(".")
        data[section][key] = value
    validate(data)
    return Config(data, base_dir)
