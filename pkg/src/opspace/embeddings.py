"""Sentence vector sources: precomputed files, token averaging, synthetic.

Sentence ids follow a per-pair convention: the premise of pair p has
sentence id 2*p and the hypothesis 2*p + 1. Identical sentence texts
appearing in different pairs therefore occupy separate rows, which is
what the synthetic generator requires.

All randomness here comes from NumPy's PCG64 (a permuted
linear-congruential generator), explicitly seeded, so outputs are
bit-reproducible for a given seed across platforms.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import SentencePair
from .errors import InputError
from .patterns import PatternGroup, sort_groups


def premise_sentence_id(pair_id: int) -> int:
    return 2 * pair_id


def hypothesis_sentence_id(pair_id: int) -> int:
    return 2 * pair_id + 1


@dataclass
class EmbeddingMatrix:
    dim: int
    rows: dict[int, np.ndarray]
    provider_tag: str = ""
    meta: dict | None = None

    def vector(self, sentence_id: int) -> np.ndarray:
        return self.rows[sentence_id]

    def __contains__(self, sentence_id: int) -> bool:
        return sentence_id in self.rows

    def validate(self) -> "EmbeddingMatrix":
        for sid, vec in self.rows.items():
            if vec.shape != (self.dim,):
                raise ValueError(
                    f"sentence {sid}: vector length {vec.shape[0]} != dim {self.dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"sentence {sid}: non-finite value in vector")
        return self


@dataclass
class TokenVectorTable:
    dim: int
    vectors: dict[str, np.ndarray]
    oov_policy: str = "zero_vector"  # or "hashed_random"

    _oov_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def lookup(self, token: str) -> np.ndarray:
        vec = self.vectors.get(token)
        if vec is not None:
            return vec
        if self.oov_policy == "zero_vector":
            return np.zeros(self.dim)
        if self.oov_policy == "hashed_random":
            cached = self._oov_cache.get(token)
            if cached is None:
                # PCG64 seeded from the SHA-256 of the token bytes; unit
                # expected norm. Stable across runs and platforms.
                seed = int.from_bytes(
                    hashlib.sha256(token.encode("utf-8")).digest()[:8], "big"
                )
                rng = np.random.Generator(np.random.PCG64(seed))
                cached = rng.standard_normal(self.dim) / np.sqrt(self.dim)
                self._oov_cache[token] = cached
            return cached
        raise ValueError(f"unknown oov_policy {self.oov_policy!r}")


def load_sentence_vectors(path: str | Path) -> EmbeddingMatrix:
    """Load a JSON Lines sentence-vector file: {"id": int, "vector": [...]}.

    The dimensionality is fixed by the first record. Dimension mismatch,
    non-finite values and duplicate ids are fatal, with the line number.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read sentence vectors {path}: {exc}") from exc
    rows: dict[int, np.ndarray] = {}
    meta: dict | None = None
    dim: int | None = None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if lineno == 1 and isinstance(obj, dict) and "_meta" in obj:
            meta = obj["_meta"]
            continue
        if not isinstance(obj, dict) or "id" not in obj or "vector" not in obj:
            raise InputError(f"{path}:{lineno}: expected an object with id and vector")
        sid = obj["id"]
        if not isinstance(sid, int):
            raise InputError(f"{path}:{lineno}: id must be an integer")
        if sid in rows:
            raise InputError(f"{path}:{lineno}: duplicate sentence id {sid}")
        vec = np.asarray(obj["vector"], dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] == 0:
            raise InputError(f"{path}:{lineno}: vector must be a non-empty flat list")
        if dim is None:
            dim = int(vec.shape[0])
        elif vec.shape[0] != dim:
            raise InputError(
                f"{path}:{lineno}: vector length {vec.shape[0]} != expected {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise InputError(f"{path}:{lineno}: non-finite value in vector")
        rows[sid] = vec
    if dim is None:
        raise InputError(f"{path}: no records")
    return EmbeddingMatrix(dim, rows, provider_tag=str(path), meta=meta).validate()


def write_sentence_vectors(
    path: str | Path, matrix: EmbeddingMatrix, meta: dict | None = None
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for sid in sorted(matrix.rows):
            record = {"id": sid, "vector": matrix.rows[sid].tolist()}
            fh.write(json.dumps(record) + "\n")


def load_token_vectors(path: str | Path, oov_policy: str = "zero_vector") -> TokenVectorTable:
    """Load a text word-vector table: one "token v1 v2 ... vd" per line."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read token vectors {path}: {exc}") from exc
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) < 2:
            raise InputError(f"{path}:{lineno}: expected a token and at least one value")
        token = parts[0]
        try:
            vec = np.asarray([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad float: {exc}") from exc
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise InputError(
                f"{path}:{lineno}: vector length {vec.shape[0]} != expected {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise InputError(f"{path}:{lineno}: non-finite value")
        vectors[token] = vec
    if dim is None:
        raise InputError(f"{path}: no records")
    return TokenVectorTable(dim, vectors, oov_policy)


def average_tokens(sentence: Sequence[str], table: TokenVectorTable) -> np.ndarray:
    """Arithmetic mean of the token vectors of a sentence.

    Out-of-vocabulary tokens follow the table's policy; with zero_vector
    they contribute a zero row but still count in the denominator.
    """
    if len(sentence) == 0:
        raise ValueError("cannot embed an empty sentence")
    acc = np.zeros(table.dim)
    for token in sentence:
        acc += table.lookup(token)
    return acc / len(sentence)


def embed_pairs(
    pairs: Iterable[SentencePair], table: TokenVectorTable, provider_tag: str = "token_average"
) -> EmbeddingMatrix:
    """Token-average both sides of every pair into an EmbeddingMatrix."""
    rows: dict[int, np.ndarray] = {}
    for pair in pairs:
        rows[premise_sentence_id(pair.id)] = average_tokens(pair.premise, table)
        rows[hypothesis_sentence_id(pair.id)] = average_tokens(pair.hypothesis, table)
    return EmbeddingMatrix(table.dim, rows, provider_tag).validate()


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0 else vec


# All planted components live on this dyadic grid, so the few additions in
# the construction are exact in float64 and premise - hypothesis recovers
# noise - offset - noise' bitwise (exactly -offset at noise 0).
_GRID = 2.0**26


def _on_grid(vec: np.ndarray) -> np.ndarray:
    return np.round(vec * _GRID) / _GRID


def synthesize_planted(
    groups: Sequence[PatternGroup],
    dim: int,
    offset_scale: float,
    noise_scale: float,
    seed: int,
) -> EmbeddingMatrix:
    """Synthetic embeddings with a known offset planted per pattern.

    Every group gets a fixed random direction of norm offset_scale. For
    each member pair, premise = base + noise and hypothesis =
    base + offset + noise', where base is a standard-normal vector per
    pair and each noise term is a random direction of norm noise_scale.
    The premise-minus-hypothesis difference is therefore the group's
    -offset up to noise, which is what a clustering of the subtraction
    space should recover. Deterministic for a given seed (PCG64);
    components are quantized to a 2**-26 grid to keep the construction
    arithmetic exact.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if offset_scale <= 0 or noise_scale < 0:
        raise ValueError("offset_scale must be > 0 and noise_scale >= 0")
    rng = np.random.default_rng(seed)
    rows: dict[int, np.ndarray] = {}
    for group in sort_groups(groups):
        offset = _on_grid(_unit(rng.standard_normal(dim)) * offset_scale)
        for pair_id in group.members:
            base = _on_grid(rng.standard_normal(dim))
            noise_p = _on_grid(_unit(rng.standard_normal(dim)) * noise_scale)
            noise_h = _on_grid(_unit(rng.standard_normal(dim)) * noise_scale)
            rows[premise_sentence_id(pair_id)] = base + noise_p
            rows[hypothesis_sentence_id(pair_id)] = (base + offset) + noise_h
    return EmbeddingMatrix(dim, rows, provider_tag="planted").validate()
