"""The space of operations: elementwise combinations of embedded pairs.

Each sentence pair becomes one point: the premise and hypothesis vectors
combined by one of four elementwise operations, tagged with the pair's
pattern id (its ground-truth class).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import artifacts
from .embeddings import EmbeddingMatrix, hypothesis_sentence_id, premise_sentence_id
from .errors import InputError
from .patterns import PatternGroup, sort_groups

# Denominator guard for elementwise division: components whose
# denominator magnitude falls below this yield 0 and are counted.
DIVIDE_EPSILON = 1e-8


class OperationKind(str, Enum):
    SUBTRACT = "subtract"
    ADD = "add"
    MULTIPLY = "multiply"
    DIVIDE = "divide"


@dataclass
class OperationPoint:
    pair_id: int
    pattern_id: int
    vector: np.ndarray


@dataclass
class OpSpaceStats:
    points: int = 0
    guarded_components: int = 0


def guarded_divide(premise_vec: np.ndarray, hypothesis_vec: np.ndarray) -> tuple[np.ndarray, int]:
    """Elementwise premise/hypothesis with near-zero denominators mapped to 0."""
    small = np.abs(hypothesis_vec) < DIVIDE_EPSILON
    safe = np.where(small, 1.0, hypothesis_vec)
    out = np.where(small, 0.0, premise_vec / safe)
    return out, int(small.sum())


def apply_operation(
    kind: OperationKind, premise_vec: np.ndarray, hypothesis_vec: np.ndarray
) -> np.ndarray:
    """Combine two equal-length finite vectors; output is always finite."""
    p = np.asarray(premise_vec, dtype=np.float64)
    h = np.asarray(hypothesis_vec, dtype=np.float64)
    if p.shape != h.shape:
        raise ValueError(f"vector length mismatch: {p.shape} vs {h.shape}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(h))):
        raise ValueError("non-finite input vector")
    kind = OperationKind(kind)
    if kind is OperationKind.SUBTRACT:
        return p - h
    if kind is OperationKind.ADD:
        return p + h
    if kind is OperationKind.MULTIPLY:
        return p * h
    out, _ = guarded_divide(p, h)
    return out


def build_operation_space(
    groups: Sequence[PatternGroup],
    embeddings: EmbeddingMatrix,
    kind: OperationKind,
    normalize: bool = False,
    stats: OpSpaceStats | None = None,
) -> list[OperationPoint]:
    """One operation point per member pair, ordered by pair id.

    Pattern ids enumerate the groups in canonical sorted order. A missing
    embedding row is fatal and names every offending sentence id. The
    optional normalize flag rescales each point to unit norm (off by
    default; zero vectors are left untouched).
    """
    kind = OperationKind(kind)
    ordered = sort_groups(groups)
    missing: list[int] = []
    for group in ordered:
        for pair_id in group.members:
            for sid in (premise_sentence_id(pair_id), hypothesis_sentence_id(pair_id)):
                if sid not in embeddings:
                    missing.append(sid)
    if missing:
        raise ValueError(
            f"missing embedding rows for sentence ids: {sorted(missing)}"
        )
    if stats is None:
        stats = OpSpaceStats()
    points: list[OperationPoint] = []
    for pattern_id, group in enumerate(ordered):
        for pair_id in group.members:
            p = embeddings.vector(premise_sentence_id(pair_id))
            h = embeddings.vector(hypothesis_sentence_id(pair_id))
            if kind is OperationKind.DIVIDE:
                vec, guarded = guarded_divide(p, h)
                stats.guarded_components += guarded
            else:
                vec = apply_operation(kind, p, h)
            if normalize:
                norm = float(np.linalg.norm(vec))
                if norm > 0:
                    vec = vec / norm
            points.append(OperationPoint(pair_id, pattern_id, vec))
    points.sort(key=lambda pt: pt.pair_id)
    stats.points = len(points)
    return points


def points_matrix(points: Sequence[OperationPoint]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack points into (vectors, pattern_ids, pair_ids) arrays."""
    if not points:
        raise ValueError("no operation points")
    x = np.stack([pt.vector for pt in points]).astype(np.float64)
    pattern_ids = np.asarray([pt.pattern_id for pt in points], dtype=np.int64)
    pair_ids = np.asarray([pt.pair_id for pt in points], dtype=np.int64)
    return x, pattern_ids, pair_ids


def write_operation_space(
    path, points: Sequence[OperationPoint], meta: dict | None = None
) -> None:
    records = [
        {"pair_id": pt.pair_id, "pattern_id": pt.pattern_id, "vector": pt.vector.tolist()}
        for pt in points
    ]
    artifacts.write_jsonl(path, records, meta)


def read_operation_space(path) -> tuple[list[OperationPoint], dict | None]:
    records, meta = artifacts.read_jsonl(path)
    points = []
    for record in records:
        try:
            points.append(
                OperationPoint(
                    int(record["pair_id"]),
                    int(record["pattern_id"]),
                    np.asarray(record["vector"], dtype=np.float64),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: malformed operation point: {exc}") from exc
    return points, meta
