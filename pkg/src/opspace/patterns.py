"""String-edit pattern mining over tokenized sentence pairs.

A pattern is obtained by twice replacing the longest common whole-word
substring of a (premise, hypothesis) pair with a variable, then
canonicalizing variable order. Patterns are grouped per inference label
and filtered by minimum support, dropping the identity pattern.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import artifacts, kernels
from .corpus import LABEL_RANK, Label, SentencePair
from .errors import InputError

# Reserved variable tokens. Corpus tokens are always lowercase, so the
# uppercase display forms "X"/"Y" are unambiguous in reports and files.
VAR_X = "⟨X⟩"
VAR_Y = "⟨Y⟩"
_DISPLAY = {VAR_X: "X", VAR_Y: "Y"}
_PARSE = {"X": VAR_X, "Y": VAR_Y}


def render_token(token: str) -> str:
    return _DISPLAY.get(token, token)


def render_template(template: Sequence[str]) -> str:
    return " ".join(render_token(t) for t in template)


def parse_template(tokens: Sequence[str]) -> tuple[str, ...]:
    return tuple(_PARSE.get(t, t) for t in tokens)


@dataclass(frozen=True)
class Pattern:
    premise_template: tuple[str, ...]
    hypothesis_template: tuple[str, ...]
    num_variables: int

    def render(self) -> str:
        return (
            f"{render_template(self.premise_template)} → "
            f"{render_template(self.hypothesis_template)}"
        )


@dataclass(frozen=True)
class Extraction:
    """A pattern together with the substring each variable captured."""

    pattern: Pattern
    x_tokens: tuple[str, ...] | None
    y_tokens: tuple[str, ...] | None


@dataclass
class PatternGroup:
    pattern: Pattern
    label: Label
    members: list[int]

    @property
    def size(self) -> int:
        return len(self.members)


def longest_common_substring(
    a: Sequence[str], b: Sequence[str], forbidden: frozenset[str] | set[str] = frozenset()
) -> tuple[int, int, int] | None:
    """Longest contiguous token run present in both sequences.

    Runs containing a forbidden token are excluded. Returns
    (start_a, start_b, length) or None when no common token exists.
    Ties break toward the smallest start_a, then the smallest start_b.
    """
    vocab: dict[str, int] = {}
    enc_a = np.empty(len(a), dtype=np.int32)
    for i, tok in enumerate(a):
        enc_a[i] = -1 if tok in forbidden else vocab.setdefault(tok, len(vocab))
    enc_b = np.empty(len(b), dtype=np.int32)
    for i, tok in enumerate(b):
        enc_b[i] = -2 if tok in forbidden else vocab.setdefault(tok, len(vocab))
    start_a, start_b, length = kernels.lcs_longest(enc_a, enc_b)
    if length == 0:
        return None
    return (start_a, start_b, length)


def _replace_run(seq: tuple[str, ...], start: int, length: int, var: str) -> tuple[str, ...]:
    return seq[:start] + (var,) + seq[start + length :]


def extract_template(
    premise: Sequence[str], hypothesis: Sequence[str]
) -> Extraction:
    """Reduce a tokenized pair to its canonical edit pattern.

    Pass 1 replaces the longest common run with one variable in both
    sides; pass 2 repeats on the remainder (runs containing the first
    variable are excluded). If the second variable ends up before the
    first in the premise template, the two variables swap names.
    """
    premise = tuple(premise)
    hypothesis = tuple(hypothesis)
    first = longest_common_substring(premise, hypothesis)
    if first is None:
        return Extraction(Pattern(premise, hypothesis, 0), None, None)
    sa, sb, length = first
    x_tokens = premise[sa : sa + length]
    p1 = _replace_run(premise, sa, length, VAR_X)
    h1 = _replace_run(hypothesis, sb, length, VAR_X)
    second = longest_common_substring(p1, h1, forbidden={VAR_X})
    if second is None:
        return Extraction(Pattern(p1, h1, 1), x_tokens, None)
    sa2, sb2, length2 = second
    y_tokens = p1[sa2 : sa2 + length2]
    p2 = _replace_run(p1, sa2, length2, VAR_Y)
    h2 = _replace_run(h1, sb2, length2, VAR_Y)
    if p2.index(VAR_Y) < p2.index(VAR_X):
        p2 = tuple(_swap_var(t) for t in p2)
        h2 = tuple(_swap_var(t) for t in h2)
        x_tokens, y_tokens = y_tokens, x_tokens
    return Extraction(Pattern(p2, h2, 2), x_tokens, y_tokens)


def _swap_var(token: str) -> str:
    if token == VAR_X:
        return VAR_Y
    if token == VAR_Y:
        return VAR_X
    return token


def extract_pattern(pair: SentencePair) -> Pattern:
    return extract_template(pair.premise, pair.hypothesis).pattern


def substitute(
    template: Sequence[str],
    x_tokens: Sequence[str] | None,
    y_tokens: Sequence[str] | None,
) -> tuple[str, ...]:
    """Expand a template by substituting captured runs back for X/Y."""
    out: list[str] = []
    for token in template:
        if token == VAR_X:
            out.extend(x_tokens or ())
        elif token == VAR_Y:
            out.extend(y_tokens or ())
        else:
            out.append(token)
    return tuple(out)


def is_identity(pattern: Pattern) -> bool:
    """The whole-sentence X -> X pattern (string-identical pair)."""
    return (
        pattern.num_variables == 1
        and pattern.premise_template == (VAR_X,)
        and pattern.hypothesis_template == (VAR_X,)
    )


def group_patterns(pairs: Iterable[SentencePair]) -> list[PatternGroup]:
    """One group per distinct (pattern, label), canonically sorted."""
    groups: dict[tuple[Pattern, Label], PatternGroup] = {}
    for pair in pairs:
        pattern = extract_pattern(pair)
        key = (pattern, pair.label)
        group = groups.get(key)
        if group is None:
            groups[key] = PatternGroup(pattern, pair.label, [pair.id])
        else:
            group.members.append(pair.id)
    return sort_groups(groups.values())


def sort_groups(groups: Iterable[PatternGroup]) -> list[PatternGroup]:
    """Canonical group order: label, descending size, then templates.

    This order defines the pattern_id enumeration used across the
    pipeline, so it must stay deterministic.
    """
    return sorted(
        groups,
        key=lambda g: (
            LABEL_RANK[g.label],
            -g.size,
            render_template(g.pattern.premise_template),
            render_template(g.pattern.hypothesis_template),
        ),
    )


def filter_groups(
    groups: Iterable[PatternGroup],
    min_support: int = 20,
    drop_identity: bool = True,
) -> list[PatternGroup]:
    """Drop groups below min_support and (optionally) the identity pattern."""
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    kept = [
        g
        for g in groups
        if g.size >= min_support and not (drop_identity and is_identity(g.pattern))
    ]
    return sort_groups(kept)


def distinct_pattern_count(groups: Iterable[PatternGroup]) -> int:
    """Number of distinct patterns ignoring the label dimension."""
    return len({g.pattern for g in groups})


def write_pattern_report(
    path: str | Path,
    groups: Sequence[PatternGroup],
    meta: dict | None = None,
    timestamp: str | None = None,
) -> None:
    """CSV report with one row per group: label and both templates."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in artifacts.csv_header_lines(meta, timestamp):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["label", "premise_template", "hypothesis_template", "count"])
        for group in sort_groups(groups):
            writer.writerow(
                [
                    group.label.value,
                    render_template(group.pattern.premise_template),
                    render_template(group.pattern.hypothesis_template),
                    group.size,
                ]
            )


def write_group_manifest(
    path: str | Path, groups: Sequence[PatternGroup], meta: dict | None = None
) -> None:
    """JSON Lines manifest: one object per group with its member pair ids."""
    records = []
    for pattern_id, group in enumerate(sort_groups(groups)):
        records.append(
            {
                "pattern_id": pattern_id,
                "label": group.label.value,
                "premise_template": [render_token(t) for t in group.pattern.premise_template],
                "hypothesis_template": [
                    render_token(t) for t in group.pattern.hypothesis_template
                ],
                "num_variables": group.pattern.num_variables,
                "members": list(group.members),
            }
        )
    artifacts.write_jsonl(path, records, meta)


def read_group_manifest(path: str | Path) -> tuple[list[PatternGroup], dict | None]:
    records, meta = artifacts.read_jsonl(path)
    groups = []
    for record in records:
        try:
            pattern = Pattern(
                parse_template(record["premise_template"]),
                parse_template(record["hypothesis_template"]),
                int(record["num_variables"]),
            )
            groups.append(
                PatternGroup(pattern, Label(record["label"]), [int(m) for m in record["members"]])
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"{path}: malformed group record: {exc}") from exc
    return sort_groups(groups), meta
