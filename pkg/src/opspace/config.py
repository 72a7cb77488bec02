"""Pipeline configuration: flat key-value file, overrides, hashing.

Configuration lives in a flat "key = value" text file; command-line
--set overrides take precedence. Every resolved value (defaults
included) is printed into the run manifest so a run is fully auditable.
The config hash covers every field except out_dir and identifies the
artifacts one run produces.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


@dataclass
class PipelineConfig:
    corpus_paths: tuple[str, ...] = ()
    corpus_format: str = "json_lines"  # or tab_separated
    min_support: int = 20
    drop_identity: bool = True
    operations: tuple[str, ...] = ("subtract", "add", "multiply", "divide")
    embedding_source: str = "planted"  # planted | sentence_vectors | token_average
    sentence_vectors_path: str = ""
    token_vectors_path: str = ""
    oov_policy: str = "zero_vector"
    planted_dim: int = 64
    planted_offset_scale: float = 1.0
    planted_noise_scale: float = 0.1
    kmeans_restarts: int = 100
    kmeans_max_iter: int = 300
    kmeans_tol: float = 1e-6
    seed: int = 0
    noisy_top_n: int = 7
    k_min: int = 2
    k_max: int = 30
    cluster_k: int = 0  # 0 means "number of patterns"
    normalize_ops: bool = False
    ami_normalizer: str = "arithmetic"
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 1000
    tsne_early_exaggeration: float = 12.0
    tsne_learning_rate: float = 200.0
    out_dir: str = "opspace_out"

    def resolved(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["corpus_paths"] = list(self.corpus_paths)
        doc["operations"] = list(self.operations)
        return doc

    def config_hash(self) -> str:
        doc = self.resolved()
        doc.pop("out_dir")
        blob = json.dumps(doc, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, value: str):
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    default = getattr(PipelineConfig(), name)
    try:
        if isinstance(default, bool):
            lowered = value.strip().lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, tuple):
            return tuple(v.strip() for v in value.split(",") if v.strip())
        return value.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name!r}: {exc}") from exc


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse a flat key-value config file; missing path means defaults."""
    cfg = PipelineConfig()
    if path is None:
        return cfg
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        setattr(cfg, key, _coerce(key, value.strip()))
    return cfg


def apply_overrides(cfg: PipelineConfig, overrides: list[str]) -> PipelineConfig:
    """Apply repeated --set KEY=VALUE command-line overrides."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        setattr(cfg, key, _coerce(key, value.strip()))
    return cfg


def validate_paths(cfg: PipelineConfig, need_corpus: bool = False) -> None:
    if need_corpus:
        if not cfg.corpus_paths:
            raise ConfigError("corpus_paths is empty; set corpus_paths=<file>[,<file>...]")
        for p in cfg.corpus_paths:
            if not Path(p).exists():
                raise ConfigError(f"corpus path does not exist: {p}")
    if cfg.embedding_source == "sentence_vectors" and not Path(cfg.sentence_vectors_path).exists():
        raise ConfigError(
            f"sentence_vectors_path does not exist: {cfg.sentence_vectors_path!r}"
        )
    if cfg.embedding_source == "token_average" and not Path(cfg.token_vectors_path).exists():
        raise ConfigError(f"token_vectors_path does not exist: {cfg.token_vectors_path!r}")
