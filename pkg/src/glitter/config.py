"""Annotation options, service settings and backend registry construction.

Configuration comes from a TOML file (service, batch) or command-line
flags (interactive use). Both funnel into the same frozen dataclasses.
API keys are never configuration values; a backend entry names the
environment variable that holds the key and the value is read at startup.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import canonical
from .backends import (
    Backend,
    HttpLogprobBackend,
    NgramBackend,
    PrecomputedBackend,
    load_model,
)
from .core import DEFAULT_BASE, DEFAULT_BUCKET_BOUNDS, DEFAULT_SURPRISAL_CAP, validate_bucket_bounds
from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class GlitterConfig:
    """Options that shape an annotation run.

    ``top_k`` is how many candidates to request per position (display is
    capped at five regardless). ``stride_fraction`` controls window overlap
    for bounded-context sources: the window advances by this fraction of
    its size, so smaller values keep more context at the cost of more
    calls.
    """

    base: float = DEFAULT_BASE
    surprisal_cap: float = DEFAULT_SURPRISAL_CAP
    bucket_bounds: tuple[int, ...] = DEFAULT_BUCKET_BOUNDS
    formulaic_threshold: float = 1.0
    formulaic_min_len: int = 4
    top_k: int = 5
    stride_fraction: float = 0.5

    def validate(self) -> None:
        if not self.base > 1.0:
            raise ConfigError(f"base must be > 1, got {self.base!r}")
        if not self.surprisal_cap > 0.0:
            raise ConfigError(f"surprisal_cap must be > 0, got {self.surprisal_cap!r}")
        try:
            validate_bucket_bounds(self.bucket_bounds)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.formulaic_threshold > 0.0:
            raise ConfigError(f"formulaic_threshold must be > 0, got {self.formulaic_threshold!r}")
        if self.formulaic_min_len < 2:
            raise ConfigError(f"formulaic_min_len must be >= 2, got {self.formulaic_min_len!r}")
        if self.top_k < 0:
            raise ConfigError(f"top_k must be >= 0, got {self.top_k!r}")
        if not 0.0 < self.stride_fraction <= 1.0:
            raise ConfigError(f"stride_fraction must be in (0, 1], got {self.stride_fraction!r}")

    def digest(self) -> str:
        payload = {
            "base": self.base,
            "surprisal_cap": self.surprisal_cap,
            "bucket_bounds": list(self.bucket_bounds),
            "formulaic_threshold": self.formulaic_threshold,
            "formulaic_min_len": self.formulaic_min_len,
            "top_k": self.top_k,
            "stride_fraction": self.stride_fraction,
        }
        return hashlib.sha256(canonical.dump_bytes(payload)).hexdigest()[:12]

    def with_overrides(self, data: Mapping[str, Any]) -> "GlitterConfig":
        known = {f.name for f in fields(self)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown annotation option(s): {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        if "bucket_bounds" in kwargs:
            try:
                kwargs["bucket_bounds"] = tuple(int(b) for b in kwargs["bucket_bounds"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bucket_bounds must be a list of integers: {exc}") from exc
        try:
            config = replace(self, **kwargs)
            config.validate()
        except ConfigError:
            raise
        except TypeError as exc:
            raise ConfigError(f"bad annotation option value: {exc}") from exc
        return config

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "GlitterConfig":
        return cls().with_overrides(data)

    def override(self, **kwargs: Any) -> "GlitterConfig":
        config = replace(self, **{k: v for k, v in kwargs.items() if v is not None})
        config.validate()
        return config


BACKEND_TYPES = ("ngram", "precomputed", "http")


@dataclass(frozen=True)
class BackendSpec:
    """One backend entry of a configuration file."""

    id: str
    type: str
    path: str | None = None
    endpoint: str | None = None
    model: str | None = None
    api_key_env: str | None = None
    mode: str = "kn"
    max_context_tokens: int | None = None
    top_k_limit: int | None = None

    def validate(self) -> None:
        if not self.id:
            raise ConfigError("backend entries need a non-empty id")
        if self.type not in BACKEND_TYPES:
            raise ConfigError(f"backend {self.id!r}: unknown type {self.type!r}")
        if self.type in ("ngram", "precomputed") and not self.path:
            raise ConfigError(f"backend {self.id!r}: type {self.type!r} needs a path")
        if self.type == "http" and not (self.endpoint and self.model):
            raise ConfigError(f"backend {self.id!r}: type 'http' needs endpoint and model")


@dataclass(frozen=True)
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8417
    max_text_chars: int = 200_000
    token_budget: int = 50_000
    cors_origins: tuple[str, ...] = ()
    annotation: GlitterConfig = field(default_factory=GlitterConfig)
    backends: tuple[BackendSpec, ...] = ()

    def validate(self) -> None:
        if self.max_text_chars < 1:
            raise ConfigError(f"max_text_chars must be >= 1, got {self.max_text_chars!r}")
        if self.token_budget < 1:
            raise ConfigError(f"token_budget must be >= 1, got {self.token_budget!r}")
        if not 0 < self.port < 65536:
            raise ConfigError(f"port must be in 1..65535, got {self.port!r}")
        self.annotation.validate()
        seen: set[str] = set()
        for spec in self.backends:
            spec.validate()
            if spec.id in seen:
                raise ConfigError(f"duplicate backend id {spec.id!r}")
            seen.add(spec.id)


_TOP_LEVEL_KEYS = {
    "listen",
    "max_text_chars",
    "token_budget",
    "cors_origins",
    "annotation",
    "backends",
}


def _parse_listen(listen: str) -> tuple[str, int]:
    host, sep, port = listen.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen must look like 'host:port', got {listen!r}")
    try:
        return host, int(port)
    except ValueError as exc:
        raise ConfigError(f"listen port is not a number: {listen!r}") from exc


def settings_from_mapping(data: Mapping[str, Any], base_dir: Path | None = None) -> ServiceSettings:
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
    kwargs: dict[str, Any] = {}
    if "listen" in data:
        kwargs["host"], kwargs["port"] = _parse_listen(str(data["listen"]))
    if "max_text_chars" in data:
        kwargs["max_text_chars"] = int(data["max_text_chars"])
    if "token_budget" in data:
        kwargs["token_budget"] = int(data["token_budget"])
    if "cors_origins" in data:
        kwargs["cors_origins"] = tuple(str(o) for o in data["cors_origins"])
    if "annotation" in data:
        kwargs["annotation"] = GlitterConfig.from_mapping(data["annotation"])
    specs = []
    known_spec = {f.name for f in fields(BackendSpec)}
    for entry in data.get("backends", []):
        unknown = set(entry) - known_spec
        if unknown:
            raise ConfigError(
                f"backend {entry.get('id', '?')!r}: unknown key(s) {', '.join(sorted(unknown))}"
            )
        entry = dict(entry)
        if base_dir is not None and "path" in entry:
            entry["path"] = str((base_dir / entry["path"]).resolve())
        specs.append(BackendSpec(**entry))
    kwargs["backends"] = tuple(specs)
    settings = ServiceSettings(**kwargs)
    settings.validate()
    return settings


def load_settings(path: str | Path) -> ServiceSettings:
    """Parse a TOML configuration file. Relative backend paths are taken
    relative to the file, not the process working directory."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"configuration file {path} is not valid TOML: {exc}") from exc
    return settings_from_mapping(data, base_dir=path.parent)


def build_backend(spec: BackendSpec) -> Backend:
    spec.validate()
    if spec.type == "ngram":
        model = load_model(spec.path)
        return NgramBackend(
            model,
            mode=spec.mode,
            backend_id=spec.id,
            max_context_tokens=spec.max_context_tokens,
        )
    if spec.type == "precomputed":
        return PrecomputedBackend.from_path(spec.path, backend_id=spec.id)
    api_key = None
    if spec.api_key_env:
        api_key = os.environ.get(spec.api_key_env)
        if api_key is None:
            raise ConfigError(
                f"backend {spec.id!r}: environment variable {spec.api_key_env} is not set"
            )
    return HttpLogprobBackend(
        endpoint=spec.endpoint,
        model=spec.model,
        api_key=api_key,
        backend_id=spec.id,
        max_context_tokens=spec.max_context_tokens or 1024,
        top_k_limit=spec.top_k_limit or 5,
    )


def build_registry(settings: ServiceSettings) -> dict[str, Backend]:
    """Instantiate every configured backend up front. A broken entry fails
    here, at startup, not on the first request that needs it."""
    registry: dict[str, Backend] = {}
    for spec in settings.backends:
        registry[spec.id] = build_backend(spec)
    return registry
