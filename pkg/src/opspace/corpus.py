"""Sentence-pair corpus ingestion: parsing, normalization, deduplication.

Reads NLI-style corpora (JSON lines with sentence1/sentence2/gold_label,
or three-column tab-separated files), lowercases and tokenizes both sides
with a deterministic rule tokenizer, and deduplicates on the
(premise tokens, hypothesis tokens, label) triple.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InputError


class Label(str, Enum):
    ENTAILMENT = "entailment"
    CONTRADICTION = "contradiction"
    NEUTRAL = "neutral"


LABEL_RANK = {label: i for i, label in enumerate(Label)}

FORMATS = ("json_lines", "tab_separated")


@dataclass
class RawPair:
    premise_text: str
    hypothesis_text: str
    label: Label


@dataclass
class SentencePair:
    id: int
    premise: tuple[str, ...]
    hypothesis: tuple[str, ...]
    label: Label
    source: str = ""


@dataclass
class IngestStats:
    """Counters reported by every ingestion run (never silent skips)."""

    records: int = 0
    skipped: int = 0  # malformed records and unusable gold labels ("-", anything else)
    rejected: int = 0  # records whose text tokenized to nothing
    duplicates: int = 0
    kept: int = 0

    def summary(self) -> str:
        return (
            f"records={self.records} kept={self.kept} skipped={self.skipped} "
            f"rejected={self.rejected} duplicates={self.duplicates}"
        )


# Punctuation split off token edges, and clitics split off token ends.
_PUNCT = set(".,!?;:\"'`()[]")
_CLITICS = ("n't", "'ll", "'re", "'ve", "'s", "'d", "'m")


def _split_chunk(chunk: str) -> list[str]:
    lead: list[str] = []
    trail: list[str] = []
    while True:
        if len(chunk) <= 1 or chunk in _CLITICS:
            break
        if chunk[0] in _PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
            continue
        if chunk[-1] in _PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
            continue
        for clitic in _CLITICS:
            if chunk.endswith(clitic) and len(chunk) > len(clitic):
                trail.append(clitic)
                chunk = chunk[: -len(clitic)]
                break
        else:
            break
    return lead + [chunk] + trail[::-1]


def tokenize(text: str) -> list[str]:
    """Deterministic rule tokenizer.

    Lowercases, splits on whitespace, repeatedly peels edge punctuation
    ( . , ! ? ; : " ' ` ( ) [ ] ) into separate tokens, and splits the
    clitics 's 'll 're 've 'd 'm n't off token ends. Idempotent on its
    own output: re-tokenizing the space-joined tokens reproduces them.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def parse_corpus(
    path: str | Path, format: str, stats: IngestStats | None = None
) -> Iterator[RawPair]:
    """Stream RawPair records from a corpus file.

    Malformed records and records with a gold label outside the three
    relations are skipped and counted in stats.skipped; blank lines are
    ignored. An unreadable file raises InputError.
    """
    if format not in FORMATS:
        raise InputError(f"unknown corpus format {format!r} (expected one of {FORMATS})")
    path = Path(path)
    if stats is None:
        stats = IngestStats()
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read corpus file {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            stats.records += 1
            raw = _parse_record(line, format)
            if raw is None:
                stats.skipped += 1
                continue
            yield raw


def _parse_record(line: str, format: str) -> RawPair | None:
    if format == "json_lines":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            return None
        if not isinstance(obj, dict):
            return None
        premise = obj.get("sentence1")
        hypothesis = obj.get("sentence2")
        label = obj.get("gold_label")
    else:
        cols = line.split("\t")
        if len(cols) != 3:
            return None
        premise, hypothesis, label = cols
    if not isinstance(premise, str) or not isinstance(hypothesis, str):
        return None
    if not premise.strip() or not hypothesis.strip():
        return None
    try:
        parsed = Label(label)
    except ValueError:
        return None  # includes the "-" annotator-disagreement label
    return RawPair(premise, hypothesis, parsed)


def normalize(raw: RawPair, next_id: int, source: str = "") -> SentencePair:
    """Lowercase and tokenize a raw pair into a SentencePair.

    Raises InputError when either side tokenizes to an empty sequence.
    """
    premise = tuple(tokenize(raw.premise_text))
    hypothesis = tuple(tokenize(raw.hypothesis_text))
    if not premise or not hypothesis:
        raise InputError(
            f"record {next_id}: text tokenized to an empty sequence "
            f"(premise={raw.premise_text!r}, hypothesis={raw.hypothesis_text!r})"
        )
    return SentencePair(next_id, premise, hypothesis, raw.label, source)


def deduplicate(
    pairs: Iterable[SentencePair], stats: IngestStats | None = None
) -> list[SentencePair]:
    """Keep the first occurrence of each (premise, hypothesis, label) triple."""
    if stats is None:
        stats = IngestStats()
    seen: set[tuple] = set()
    out: list[SentencePair] = []
    for pair in pairs:
        key = (pair.premise, pair.hypothesis, pair.label)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        out.append(pair)
    return out


def ingest(
    paths: Iterable[str | Path], format: str
) -> tuple[list[SentencePair], IngestStats]:
    """Parse, normalize and deduplicate one or more corpus files.

    Pair ids are assigned sequentially in file order across all files.
    """
    stats = IngestStats()
    pairs: list[SentencePair] = []
    next_id = 0
    for path in paths:
        source = Path(path).name
        for raw in parse_corpus(path, format, stats):
            try:
                pair = normalize(raw, next_id, source)
            except InputError:
                stats.rejected += 1
                continue
            pairs.append(pair)
            next_id += 1
    result = deduplicate(pairs, stats)
    stats.kept = len(result)
    return result, stats
