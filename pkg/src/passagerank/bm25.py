"""OKAPI BM25 inverted index: build, score, top-k retrieval, persistence.

Scoring follows the classic formula

    score(q, d) = sum over query terms t of
        idf(t) * tf(t, d) * (k1 + 1) / (tf(t, d) + k1 * (1 - b + b * |d| / avgdl))

with a floored IDF: raw_idf(t) = ln((N - df + 0.5) / (df + 0.5)); any term
whose raw IDF is <= 0 is assigned epsilon times the mean of the positive
raw IDFs, so frequent terms still contribute a small positive weight.
If no term has positive raw IDF (degenerate corpora), the floor falls
back to epsilon itself so built indexes never carry non-positive IDF.

The index is immutable after build; ``score`` and ``retrieve_topk`` are
safe for unlimited concurrent readers.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import DataError, IndexFormatError

_MAGIC = b"BM25IDX\x00"
_VERSION = 1


@dataclass(frozen=True)
class Bm25Params:
    """k1 controls term-frequency saturation, b length normalization,
    epsilon the negative-IDF floor factor."""

    k1: float = 1.2
    b: float = 0.75
    epsilon: float = 0.25

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass
class CandidateList:
    """Ordered (passage_id, score) list; the hand-off unit between stages."""

    query_id: str
    entries: list[tuple[str, float]] = field(default_factory=list)

    def __post_init__(self):
        seen: set[str] = set()
        prev: float | None = None
        for pid, score in self.entries:
            if pid in seen:
                raise DataError(f"duplicate passage id {pid!r} in candidate list")
            seen.add(pid)
            if prev is not None and score > prev:
                raise DataError(f"candidate scores must be non-increasing (at {pid!r})")
            prev = score

    def ids(self) -> list[str]:
        return [pid for pid, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


class Bm25Index:
    """Inverted index over analyzed passages. Use :func:`build_index` to create."""

    def __init__(
        self,
        postings: dict[str, tuple[np.ndarray, np.ndarray]],
        doc_len: np.ndarray,
        avgdl: float,
        idf: dict[str, float],
        ids: list[str],
        params: Bm25Params,
    ):
        self._postings = postings
        self._doc_len = doc_len
        self._avgdl = avgdl
        self._idf = idf
        self._ids = ids
        self._ord = {pid: i for i, pid in enumerate(ids)}
        self._params = params

    @property
    def n_passages(self) -> int:
        return len(self._ids)

    @property
    def avgdl(self) -> float:
        return self._avgdl

    @property
    def params(self) -> Bm25Params:
        return self._params

    @property
    def vocabulary_size(self) -> int:
        return len(self._postings)

    def passage_id(self, ordinal: int) -> str:
        return self._ids[ordinal]

    def ordinal(self, passage_id: str) -> int:
        try:
            return self._ord[passage_id]
        except KeyError:
            raise KeyError(f"passage id {passage_id!r} not in index") from None

    def doc_length(self, ordinal: int) -> int:
        return int(self._doc_len[ordinal])

    def term_idf(self, term: str) -> float | None:
        return self._idf.get(term)

    def score(self, query_tokens: Sequence[str], ordinal: int) -> float:
        """BM25 score of one passage for a query token sequence.

        Duplicate query tokens count once per occurrence; terms absent from
        the index contribute zero.
        """
        if not 0 <= ordinal < len(self._ids):
            raise IndexError(f"passage ordinal {ordinal} out of range (N={len(self._ids)})")
        k1 = self._params.k1
        b = self._params.b
        k1p1 = k1 + 1.0
        total = 0.0
        for term, count in Counter(query_tokens).items():
            posting = self._postings.get(term)
            if posting is None:
                continue
            ords, tfs = posting
            j = int(np.searchsorted(ords, ordinal))
            if j >= len(ords) or int(ords[j]) != ordinal:
                continue
            tf = float(tfs[j])
            dl = float(self._doc_len[ordinal])
            norm = k1 * (1.0 - b + b * dl / self._avgdl)
            total += float(count) * self._idf[term] * (tf * k1p1) / (tf + norm)
        return total

    def retrieve_topk(self, query_tokens: Sequence[str], k: int, query_id: str = "") -> CandidateList:
        """Top-k passages with positive score, ordered by (score desc, ordinal asc).

        Cost is proportional to the matching postings, not the corpus size.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        k1 = self._params.k1
        b = self._params.b
        k1p1 = k1 + 1.0

        ord_chunks: list[np.ndarray] = []
        contrib_chunks: list[np.ndarray] = []
        for term, count in Counter(query_tokens).items():
            posting = self._postings.get(term)
            if posting is None:
                continue
            ords, tfs = posting
            tf = tfs.astype(np.float64)
            dl = self._doc_len[ords].astype(np.float64)
            norm = k1 * (1.0 - b + b * dl / self._avgdl)
            contrib = float(count) * self._idf[term] * (tf * k1p1) / (tf + norm)
            ord_chunks.append(ords)
            contrib_chunks.append(contrib)

        if not ord_chunks:
            return CandidateList(query_id, [])

        # Accumulate term by term so each document's sum uses the same
        # left-to-right association as score(); ties then break identically
        # everywhere. Ordinals within one chunk are unique, so the fancy
        # in-place add is well defined.
        uniq_ords = np.unique(np.concatenate(ord_chunks))
        scores = np.zeros(len(uniq_ords), dtype=np.float64)
        for ords, contrib in zip(ord_chunks, contrib_chunks):
            scores[np.searchsorted(uniq_ords, ords)] += contrib

        positive = scores > 0.0
        uniq_ords = uniq_ords[positive]
        scores = scores[positive]
        if len(scores) == 0:
            return CandidateList(query_id, [])

        if len(scores) > k:
            # Bounded selection: keep everything at or above the k-th score,
            # then resolve ties on the small survivor set.
            threshold = np.partition(scores, len(scores) - k)[len(scores) - k]
            keep = scores >= threshold
            uniq_ords = uniq_ords[keep]
            scores = scores[keep]
        final = np.lexsort((uniq_ords, -scores))[:k]
        entries = [(self._ids[int(uniq_ords[i])], float(scores[i])) for i in final]
        return CandidateList(query_id, entries)


def build_index(
    corpus: Iterable[tuple[str, str]],
    analyzer,
    params: Bm25Params | None = None,
) -> Bm25Index:
    """Build an index from (passage_id, text) records.

    Passage ordinals follow input order; postings are therefore sorted and
    duplicate-free by construction. Duplicate ids and empty corpora are
    rejected.
    """
    params = params or Bm25Params()
    ids: list[str] = []
    seen: set[str] = set()
    doc_lens: list[int] = []
    post_ords: dict[str, list[int]] = {}
    post_tfs: dict[str, list[int]] = {}

    for pid, text in corpus:
        if pid in seen:
            raise DataError(f"duplicate passage id {pid!r} in corpus")
        seen.add(pid)
        ordinal = len(ids)
        ids.append(pid)
        tokens = analyzer.analyze(text)
        doc_lens.append(len(tokens))
        for term, tf in Counter(tokens).items():
            post_ords.setdefault(term, []).append(ordinal)
            post_tfs.setdefault(term, []).append(tf)

    if not ids:
        raise DataError("cannot build an index from an empty corpus")

    n = len(ids)
    doc_len = np.asarray(doc_lens, dtype=np.int32)
    avgdl = int(doc_len.sum(dtype=np.int64)) / n

    raw_idf = {
        term: math.log((n - len(ords) + 0.5) / (len(ords) + 0.5))
        for term, ords in post_ords.items()
    }
    positive = [v for v in raw_idf.values() if v > 0.0]
    floor = params.epsilon * (sum(positive) / len(positive)) if positive else params.epsilon
    idf = {term: (v if v > 0.0 else floor) for term, v in raw_idf.items()}

    postings = {
        term: (np.asarray(post_ords[term], dtype=np.int32), np.asarray(post_tfs[term], dtype=np.int32))
        for term in post_ords
    }
    return Bm25Index(postings, doc_len, avgdl, idf, ids, params)


def _write_str(fh: BinaryIO, s: str) -> None:
    raw = s.encode("utf-8")
    fh.write(struct.pack("<I", len(raw)))
    fh.write(raw)


def save_index(index: Bm25Index, path: str | Path) -> None:
    """Persist an index to the versioned binary format."""
    p = index._params
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<3d", p.k1, p.b, p.epsilon))
        fh.write(struct.pack("<Qd", index.n_passages, index._avgdl))
        fh.write(index._doc_len.astype("<i4").tobytes())
        for pid in index._ids:
            _write_str(fh, pid)
        fh.write(struct.pack("<Q", len(index._postings)))
        for term, (ords, tfs) in index._postings.items():
            _write_str(fh, term)
            fh.write(struct.pack("<d", index._idf[term]))
            fh.write(struct.pack("<Q", len(ords)))
            fh.write(ords.astype("<i4").tobytes())
            fh.write(tfs.astype("<i4").tobytes())


def _read_exact(fh: BinaryIO, n: int, path) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise IndexFormatError(f"truncated index file {path}")
    return data


def _read_str(fh: BinaryIO, path) -> str:
    (length,) = struct.unpack("<I", _read_exact(fh, 4, path))
    return _read_exact(fh, length, path).decode("utf-8")


def load_index(path: str | Path) -> Bm25Index:
    """Load an index written by :func:`save_index`.

    Scores from the loaded index are identical to the original: IDF,
    average length, and postings are stored verbatim, not recomputed.
    """
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise IndexFormatError(f"cannot read index file {path}: {exc}") from exc
    with fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise IndexFormatError(f"{path} is not a BM25 index file (bad magic)")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, path))
        if version != _VERSION:
            raise IndexFormatError(f"{path}: unsupported index version {version} (expected {_VERSION})")
        k1, b, epsilon = struct.unpack("<3d", _read_exact(fh, 24, path))
        n, avgdl = struct.unpack("<Qd", _read_exact(fh, 16, path))
        doc_len = np.frombuffer(_read_exact(fh, 4 * n, path), dtype="<i4")
        ids = [_read_str(fh, path) for _ in range(n)]
        (vocab,) = struct.unpack("<Q", _read_exact(fh, 8, path))
        postings: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        idf: dict[str, float] = {}
        for _ in range(vocab):
            term = _read_str(fh, path)
            (term_idf,) = struct.unpack("<d", _read_exact(fh, 8, path))
            (m,) = struct.unpack("<Q", _read_exact(fh, 8, path))
            ords = np.frombuffer(_read_exact(fh, 4 * m, path), dtype="<i4")
            tfs = np.frombuffer(_read_exact(fh, 4 * m, path), dtype="<i4")
            postings[term] = (ords, tfs)
            idf[term] = term_idf
        if fh.read(1):
            raise IndexFormatError(f"{path}: trailing bytes after index payload")
    return Bm25Index(postings, doc_len, avgdl, idf, ids, Bm25Params(k1, b, epsilon))
