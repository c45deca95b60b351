"""Runtime settings: JSON config file plus SCHOLARQA_* environment overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

ENV_PREFIX = "SCHOLARQA_"


@dataclass
class Settings:
    # service
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    cors_origins: tuple[str, ...] = ("*",)
    max_concurrency: int = 16
    question_max_chars: int = 4000
    debug_traces: bool = False

    # retrieval
    crossref_base_url: str = "https://api.crossref.org"
    crossref_mailto: str = ""
    rows: int = 15
    cache_dir: str = "~/.cache/scholarqa"
    cache_ttl_seconds: float = 86400.0

    # model provider: "http", "mock", or "none"
    provider_kind: str = "none"
    provider_base_url: str = ""
    provider_api_key: str = ""
    chat_model: str = ""
    embedding_model: str = ""
    chat_temperature: float = 0.0
    chat_max_tokens: int = 0  # 0 leaves the provider default in place
    provider_rate_per_second: float = 0.0  # 0 disables rate limiting
    mock_reply: str = ""

    # synthesis
    context_budget: int = 24000

    # networking
    retry_attempts: int = 3
    retry_backoff: float = 0.5

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir).expanduser()

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "Settings":
        """Read the JSON config file (if given), then apply env overrides."""
        values: dict = {}
        if path is not None:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(raw, dict):
                raise ValueError(f"config file {path} must hold a JSON object")
            known = {f.name for f in dataclasses.fields(cls)}
            unknown = set(raw) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)

        env = os.environ if env is None else env
        for f in dataclasses.fields(cls):
            env_value = env.get(ENV_PREFIX + f.name.upper())
            if env_value is not None:
                values[f.name] = _coerce(env_value, f)
        if "cors_origins" in values and not isinstance(values["cors_origins"], tuple):
            values["cors_origins"] = tuple(values["cors_origins"])
        return cls(**values)


def _coerce(raw: str, f: dataclasses.Field):
    if f.type in ("int",):
        return int(raw)
    if f.type in ("float",):
        return float(raw)
    if f.type in ("bool",):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if f.type.startswith("tuple"):
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    return raw
