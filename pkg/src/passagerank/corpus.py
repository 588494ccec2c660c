"""Corpus, query, and domain file readers.

Two text formats are auto-detected by extension: ``.jsonl``/``.ndjson``
with ``{"id": ..., "text": ...}`` objects, anything else as TSV
``id\ttext`` (the text may contain further tabs; only the first splits).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from .errors import DataError

_JSONL_SUFFIXES = {".jsonl", ".ndjson"}


def _open_lines(path: Path):
    try:
        return path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def iter_texts(path: str | Path) -> Iterator[tuple[str, str]]:
    """Stream (id, text) records from a corpus or query file."""
    path = Path(path)
    jsonl = path.suffix.lower() in _JSONL_SUFFIXES
    with _open_lines(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if jsonl:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                    raise DataError(f"{path}:{lineno}: expected an object with 'id' and 'text'")
                yield str(obj["id"]), str(obj["text"])
            else:
                head, sep, rest = line.partition("\t")
                if not sep or not head:
                    raise DataError(f"{path}:{lineno}: expected 'id\\ttext'")
                yield head, rest


def load_texts(path: str | Path) -> dict[str, str]:
    """Read a whole file into an ordered id -> text map; duplicate ids are an error."""
    out: dict[str, str] = {}
    for record_id, text in iter_texts(path):
        if record_id in out:
            raise DataError(f"duplicate id {record_id!r} in {path}")
        out[record_id] = text
    return out


def read_domains(path: str | Path) -> dict[str, str]:
    """Read a ``query_id\tdomain`` TSV mapping."""
    path = Path(path)
    out: dict[str, str] = {}
    with _open_lines(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DataError(f"{path}:{lineno}: expected 'query_id\\tdomain'")
            out[parts[0]] = parts[1]
    return out
