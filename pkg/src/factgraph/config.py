"""Runtime configuration: defaults, flat key=value files, stable hashing.

The config file is deliberately flat (one `key = value` per line, `#`
comments) so diffs stay readable. Unknown keys are rejected instead of
silently ignored, and command-line flags take precedence over file values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError
from .kgstore import DEFAULT_HEALTH_KEYWORDS


@dataclass
class Config:
    eta: float = 0.7
    alpha: float = 1.5
    d: float = 0.85
    tol: float = 1e-6
    max_iter: int = 500
    num_topics: int = 20
    theta_true: float = 0.6
    seed: int = 0
    health_keywords: tuple = DEFAULT_HEALTH_KEYWORDS
    top_sentences: int = 0  # 0 -> max(3, ceil(0.2 n))
    retrieve_top_n: int = 5
    embed_provider: str = "hash"  # "hash" or "remote"
    embed_dimension: int = 256
    embed_endpoint: str = ""
    embed_timeout: float = 10.0
    llm_endpoint: str = ""
    llm_model: str = ""
    llm_timeout: float = 30.0
    dense_eigen_bound: int = 2000
    antonym_pairs: tuple = ()  # ((relation, relation), ...)
    negation_markers: tuple = ("not_", "no_")

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError("eta must lie in [0, 1]")
        if self.alpha < 1.0:
            raise ConfigError("alpha must be >= 1")
        if not 0.0 < self.d < 1.0:
            raise ConfigError("d must lie in (0, 1)")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.num_topics < 2:
            raise ConfigError("num_topics must be >= 2")
        if not 0.0 < self.theta_true <= 1.0:
            raise ConfigError("theta_true must lie in (0, 1]")
        if self.embed_provider not in ("hash", "remote"):
            raise ConfigError("embed_provider must be 'hash' or 'remote'")
        if self.dense_eigen_bound < 1:
            raise ConfigError("dense_eigen_bound must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if key == "antonym_pairs":
        pairs = []
        for item in filter(None, (p.strip() for p in raw.split(","))):
            if ":" not in item:
                raise ConfigError(f"antonym pair '{item}' must look like relation:relation")
            a, b = item.split(":", 1)
            pairs.append((a.strip(), b.strip()))
        return tuple(pairs)
    if kind == "tuple":
        return tuple(p.strip() for p in raw.split(",") if p.strip() != "") \
            if raw != "" else ()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Parse a flat key=value file into override values; unknown keys fail."""
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{line_no}: expected key = value")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{line_no}: unknown config key '{key}'")
            try:
                overrides[key] = _parse_value(key, raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{path}:{line_no}: bad value for '{key}': {exc}") from exc
    return overrides


def build_config(file_path=None, flag_overrides: dict | None = None) -> Config:
    """Defaults <- config file <- command-line flags, in that precedence."""
    values: dict = {}
    if file_path is not None:
        values.update(read_config_file(file_path))
    for key, value in (flag_overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key '{key}'")
        values[key] = value
    return Config(**values)


def config_hash(config: Config) -> str:
    """Stable 12-hex digest of the effective configuration."""
    lines = []
    for f in sorted(_FIELD_TYPES):
        value = getattr(config, f)
        if isinstance(value, tuple):
            value = ",".join(":".join(v) if isinstance(v, tuple) else str(v) for v in value)
        lines.append(f"{f}={value}")
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    return digest[:12]
