"""Text analysis chain: tokenize, lowercase, stem, drop stopwords.

The chain order is fixed. Stemmers are pluggable: identity, a dictionary
table loaded from TSV, or an ordered suffix-rule list. Stopword and stem
resources are loaded once at pipeline construction; ``analyze`` never
touches the filesystem and is safe to call from many threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConfigError

TokenSeq = list[str]

IDENTITY = "identity"
DICTIONARY = "dictionary"
SUFFIX_RULES = "suffix-rules"
STEMMER_KINDS = (IDENTITY, DICTIONARY, SUFFIX_RULES)

UNICODE_WORDS = "unicode-words"

# Runs of Unicode letters/digits form tokens; underscore and punctuation split.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

_PACKAGE_DATA = Path(__file__).parent / "data"


def default_stopwords_path() -> Path:
    """Path of the bundled Polish stopword list."""
    return _PACKAGE_DATA / "stopwords_pl.txt"


def load_stopwords(path: str | Path) -> set[str]:
    """Read a stopword file: one word per line, '#' lines are comments.

    The returned set is lowercase-normalized and duplicate-free.
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read stopword file {path}: {exc}") from exc
    words: set[str] = set()
    for line in raw.splitlines():
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        words.add(word.lower())
    return words


def load_stem_table(path: str | Path, lowercase: bool = True) -> dict[str, str]:
    """Read a stem table TSV (``surface\\tstem``, one mapping per line).

    With ``lowercase`` both surfaces and stems are folded so the table
    matches tokens that already went through the lowercase step.
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read stem table {path}: {exc}") from exc
    table: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ConfigError(f"{path}:{lineno}: expected 'surface\\tstem', got {line!r}")
        surface, stem_ = parts
        if lowercase:
            surface, stem_ = surface.lower(), stem_.lower()
        table[surface] = stem_
    return table


def stem(
    token: str,
    kind: str,
    table: Mapping[str, str] | None = None,
    rules: Sequence[tuple[str, str]] = (),
) -> str:
    """Stem one token.

    identity returns the token unchanged; dictionary returns the table entry
    if present, else the token; suffix-rules applies at most one rule,
    trying longer suffixes first. A rule that would empty the token is a
    no-op so tokens stay non-empty.
    """
    if kind == IDENTITY:
        return token
    if kind == DICTIONARY:
        if table is None:
            return token
        return table.get(token, token)
    if kind == SUFFIX_RULES:
        for suffix, replacement in sorted(rules, key=lambda r: -len(r[0])):
            if suffix and token.endswith(suffix):
                stemmed = token[: len(token) - len(suffix)] + replacement
                return stemmed if stemmed else token
        return token
    raise ConfigError(f"unknown stemmer kind {kind!r} (expected one of {STEMMER_KINDS})")


@dataclass(frozen=True)
class AnalyzerConfig:
    """Immutable analyzer settings; resource files are resolved by Analyzer."""

    lowercase: bool = True
    stemmer: str = IDENTITY
    stem_table_path: str | Path | None = None
    suffix_rules: tuple[tuple[str, str], ...] = ()
    stopword_path: str | Path | None = None
    token_rule: str = UNICODE_WORDS


class Analyzer:
    """Deterministic text-to-tokens pipeline.

    All configuration and resource loading happens here, so a bad stopword
    or stem-table path fails construction instead of a later ``analyze``
    call. Instances are immutable and thread-safe.
    """

    def __init__(
        self,
        config: AnalyzerConfig | None = None,
        stem_table: Mapping[str, str] | None = None,
    ):
        cfg = config or AnalyzerConfig()
        if cfg.stemmer not in STEMMER_KINDS:
            raise ConfigError(f"unknown stemmer kind {cfg.stemmer!r} (expected one of {STEMMER_KINDS})")
        if cfg.token_rule != UNICODE_WORDS:
            raise ConfigError(f"unknown token rule {cfg.token_rule!r}")
        for suffix, _ in cfg.suffix_rules:
            if not suffix:
                raise ConfigError("suffix rules must have a non-empty suffix")

        if stem_table is not None:
            if cfg.lowercase:
                stem_table = {k.lower(): v.lower() for k, v in stem_table.items()}
            table = dict(stem_table)
        elif cfg.stem_table_path is not None:
            table = load_stem_table(cfg.stem_table_path, lowercase=cfg.lowercase)
        else:
            table = {}
        if cfg.stemmer == DICTIONARY and not table:
            raise ConfigError("dictionary stemmer requires a stem table")

        self._config = cfg
        self._table = table
        self._stopwords = load_stopwords(cfg.stopword_path) if cfg.stopword_path else set()

    @property
    def config(self) -> AnalyzerConfig:
        return self._config

    @property
    def stopwords(self) -> frozenset[str]:
        return frozenset(self._stopwords)

    def analyze(self, text: str) -> TokenSeq:
        """Convert raw text to the token sequence used for indexing and querying."""
        cfg = self._config
        tokens = _WORD_RE.findall(text)
        if cfg.lowercase:
            tokens = [t.lower() for t in tokens]
        if cfg.stemmer != IDENTITY:
            tokens = [stem(t, cfg.stemmer, self._table, cfg.suffix_rules) for t in tokens]
        if self._stopwords:
            # Match is case-insensitive so removal commutes with lowercasing.
            tokens = [t for t in tokens if t.lower() not in self._stopwords]
        return tokens
