"""Shared helpers for the file formats the pipeline stages exchange.

Every artifact written by this package embeds the hash of the
configuration that produced it: JSON Lines files carry it in a leading
{"_meta": ...} record, CSV/TSV files in leading "#" comment lines, plain
JSON in a "_meta" field. Consumers use require_consistent_meta to refuse
inputs produced by mismatched configurations. Files without metadata
(e.g. user-exported embedding files) are accepted as external inputs.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from .errors import InputError


def make_meta(config_hash: str, **extra: Any) -> dict:
    meta = {"config_hash": config_hash}
    meta.update(extra)
    return meta


def write_jsonl(path: str | Path, records: Iterable[dict], meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> tuple[list[dict], dict | None]:
    """Read a JSON Lines file, returning (records, meta-or-None)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    records: list[dict] = []
    meta: dict | None = None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise InputError(f"{path}:{lineno}: expected a JSON object")
        if "_meta" in obj and lineno == 1:
            meta = obj["_meta"]
            continue
        records.append(obj)
    return records, meta


def write_json(path: str | Path, payload: dict, meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = dict(payload)
    if meta is not None:
        doc["_meta"] = meta
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> tuple[dict, dict | None]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    meta = doc.pop("_meta", None)
    return doc, meta


def csv_header_lines(meta: dict | None, timestamp: str | None = None) -> list[str]:
    lines = []
    if timestamp is not None:
        lines.append(f"# generated: {timestamp}")
    if meta:
        for key in sorted(meta):
            lines.append(f"# {key}: {meta[key]}")
    return lines


def read_commented_table(path: str | Path) -> tuple[list[str], dict[str, str]]:
    """Read a CSV/TSV written by this package: (data lines, comment fields)."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    fields: dict[str, str] = {}
    data: list[str] = []
    for line in raw:
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                fields[key.strip()] = value.strip()
            continue
        if line:
            data.append(line)
    return data, fields


def require_consistent_meta(current_hash: str, *sources: tuple[str, dict | None]) -> None:
    """Fail when input artifacts carry config hashes that disagree.

    sources are (description, meta) tuples; metas of None (external files)
    are exempt. All present hashes must equal each other and current_hash.
    """
    seen: dict[str, str] = {}
    for description, meta in sources:
        if meta is None:
            continue
        got = meta.get("config_hash")
        if got is None:
            continue
        seen[description] = got
    mismatched = {d: h for d, h in seen.items() if h != current_hash}
    if mismatched:
        details = ", ".join(f"{d} has {h}" for d, h in sorted(mismatched.items()))
        raise InputError(
            f"input artifacts were produced by a different configuration "
            f"(expected config_hash {current_hash}; {details})"
        )
