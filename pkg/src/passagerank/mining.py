"""Hard-negative mining for reranker fine-tuning.

For every query, each relevant passage becomes one positive sample and is
paired with up to ``n_neg`` negatives sampled uniformly without
replacement from the query's top-``pool`` BM25 candidates minus the
relevant set. Sampling is seeded per query, so runs are reproducible and
queries can be mined in parallel without changing the output.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .bm25 import Bm25Index
from .errors import DataError
from .evaluation import Qrels
from .text import Analyzer

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairSample:
    query_id: str
    passage_id: str
    label: int


def mine_pairs(
    qrels: Qrels,
    query_texts: Mapping[str, str],
    index: Bm25Index,
    analyzer: Analyzer,
    n_neg: int = 100,
    pool: int = 2000,
    seed: int = 0,
) -> Iterator[PairSample]:
    """Yield labeled samples in qrels order: per relevant passage, one
    positive followed by its sampled negatives.

    When a query's eligible pool is smaller than ``n_neg``, all of it is
    used; a query with no BM25 candidates at all logs a warning and emits
    positives only.
    """
    if n_neg < 1:
        raise ValueError(f"n_neg must be >= 1, got {n_neg}")
    if pool < n_neg:
        raise ValueError(f"pool ({pool}) must be >= n_neg ({n_neg})")

    for qid, relevant in qrels.items():
        try:
            text = query_texts[qid]
        except KeyError:
            raise DataError(f"no text available for qrels query {qid!r}") from None
        candidates = index.retrieve_topk(analyzer.analyze(text), pool, query_id=qid)
        eligible = [pid for pid, _ in candidates.entries if pid not in relevant]
        if not candidates.entries:
            log.warning("query %s matched no passages; emitting positives only", qid)
        rng = random.Random(f"{seed}:{qid}")
        for rel_pid in sorted(relevant):
            yield PairSample(qid, rel_pid, 1)
            take = min(n_neg, len(eligible))
            if take:
                for neg_pid in rng.sample(eligible, take):
                    yield PairSample(qid, neg_pid, 0)


def write_pairs_tsv(samples: Iterable[PairSample], path: str | Path) -> None:
    """Write ``query_id\tpassage_id\tlabel`` lines."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(f"{s.query_id}\t{s.passage_id}\t{s.label}\n")


def write_pairs_jsonl(
    samples: Iterable[PairSample],
    path: str | Path,
    query_texts: Mapping[str, str],
    passage_texts: Mapping[str, str],
) -> None:
    """Write hydrated samples with full texts, one JSON object per line.

    The trainer consumes this file directly and needs no access to the
    index or corpus.
    """
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            try:
                query = query_texts[s.query_id]
            except KeyError:
                raise DataError(f"no text for query {s.query_id!r}") from None
            try:
                passage = passage_texts[s.passage_id]
            except KeyError:
                raise DataError(f"no text for passage {s.passage_id!r}") from None
            record = {
                "query_id": s.query_id,
                "passage_id": s.passage_id,
                "query": query,
                "passage": passage,
                "label": s.label,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
