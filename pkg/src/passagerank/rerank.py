"""Second stage: score the candidate head with an ensemble, fuse by summation,
re-order; the tail beyond the budget keeps its first-stage order and scores.

Fused scores are the plain sum of the per-model probability scores, so an
M-model ensemble yields values in [0, M]. First-stage scores take no part
in the fusion. To keep the output a valid CandidateList (non-increasing
scores) while leaving tail entries byte-identical, the reranked head's
scores are shifted by a constant above the tail's top score; a uniform
shift never changes the ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bm25 import CandidateList
from .errors import ConfigError, DataError, ScorerError
from .scorers import Scorer, ScorerHandle, build_scorer
from .text import Analyzer


@dataclass(frozen=True)
class RerankConfig:
    """Budget is the number of head candidates re-scored; None means all."""

    ensemble: tuple[ScorerHandle, ...]
    budget: int | None = None
    batch_size: int = 32

    def __post_init__(self):
        if not self.ensemble:
            raise ConfigError("rerank ensemble must not be empty")
        if self.budget is not None and self.budget < 1:
            raise ConfigError(f"rerank budget must be >= 1, got {self.budget}")
        if self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")


def fuse(scores_per_model: Sequence[Sequence[float]]) -> np.ndarray:
    """Sum per-model score rows columnwise. Rows must be equal length."""
    if len(scores_per_model) == 0:
        raise ValueError("need at least one model row to fuse")
    rows = [np.asarray(row, dtype=np.float64) for row in scores_per_model]
    width = rows[0].shape[0] if rows[0].ndim == 1 else -1
    for row in rows:
        if row.ndim != 1 or row.shape[0] != width:
            raise ValueError("ragged score matrix: all model rows must have equal length")
    return np.sum(rows, axis=0)


def _score_head(
    scorers: Sequence[Scorer],
    pairs: list[tuple[str, str]],
    batch_size: int,
) -> list[list[float]]:
    matrix: list[list[float]] = []
    for scorer in scorers:
        row: list[float] = []
        for batch_index, start in enumerate(range(0, len(pairs), batch_size)):
            batch = pairs[start : start + batch_size]
            try:
                out = scorer.score_batch(batch)
            except ScorerError as exc:
                raise ScorerError(scorer.name, f"batch {batch_index}: {exc}") from exc
            except Exception as exc:
                raise ScorerError(scorer.name, f"batch {batch_index}: {exc}") from exc
            if len(out) != len(batch):
                raise ScorerError(
                    scorer.name,
                    f"batch {batch_index}: returned {len(out)} scores for {len(batch)} pairs",
                )
            for s in out:
                if not 0.0 <= s <= 1.0:
                    raise ScorerError(scorer.name, f"batch {batch_index}: score {s} outside [0, 1]")
            row.extend(float(s) for s in out)
        matrix.append(row)
    return matrix


def rerank(
    candidates: CandidateList,
    query_text: str,
    cfg: RerankConfig,
    passage_store: Mapping[str, str],
    scorers: Sequence[Scorer] | None = None,
    analyzer: Analyzer | None = None,
) -> CandidateList:
    """Re-order the top-budget candidates by fused ensemble score.

    The output is a permutation of the input ids with the same length;
    entries beyond the budget are passed through untouched. Ties in the
    fused score keep the first-stage order. Any scorer failure aborts the
    call; there are no silent partial results.
    """
    entries = candidates.entries
    budget = len(entries) if cfg.budget is None else cfg.budget
    head = entries[:budget]
    tail = entries[budget:]
    if not head:
        return CandidateList(candidates.query_id, list(entries))

    texts: list[str] = []
    for pid, _ in head:
        try:
            texts.append(passage_store[pid])
        except KeyError:
            raise DataError(f"candidate passage id {pid!r} not found in passage store") from None

    if scorers is None:
        scorers = [build_scorer(h, analyzer=analyzer) for h in cfg.ensemble]
    pairs = [(query_text, text) for text in texts]
    fused = fuse(_score_head(scorers, pairs, cfg.batch_size))

    order = sorted(range(len(head)), key=lambda i: (-fused[i], i))
    shift = (tail[0][1] + 1.0) if tail else 0.0
    new_head = [(head[i][0], float(fused[i]) + shift) for i in order]
    return CandidateList(candidates.query_id, new_head + list(tail))
