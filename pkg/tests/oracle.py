"""Independent reference implementations used to freeze expected values.

Everything here is deliberately naive and self-contained: plain loops,
no numpy, no imports from the package under test. The BM25 reference
scores every document exhaustively from the formula; the NDCG reference
builds gain lists explicitly. Tests compare the fast implementations
against these.
"""

from __future__ import annotations

import math
from collections import Counter


def bm25_reference_scores(
    docs_tokens: list[list[str]],
    query_tokens: list[str],
    k1: float = 1.2,
    b: float = 0.75,
    epsilon: float = 0.25,
) -> list[float]:
    """Exhaustive BM25 scores for every document, in document order."""
    n = len(docs_tokens)
    # Count df scanning tokens in order (not via set()) so dict order, and
    # with it the float summation order of the positive-IDF mean, is
    # process-independent; exact ties must break identically everywhere.
    df: dict[str, int] = {}
    for tokens in docs_tokens:
        seen_here: set[str] = set()
        for term in tokens:
            if term not in seen_here:
                seen_here.add(term)
                df[term] = df.get(term, 0) + 1

    raw_idf = {t: math.log((n - c + 0.5) / (c + 0.5)) for t, c in df.items()}
    positives = [v for v in raw_idf.values() if v > 0.0]
    floor = epsilon * (sum(positives) / len(positives)) if positives else epsilon
    idf = {t: (v if v > 0.0 else floor) for t, v in raw_idf.items()}

    avgdl = sum(len(d) for d in docs_tokens) / n
    query_counts = Counter(query_tokens)  # occurrences of a term sum linearly
    scores = []
    for tokens in docs_tokens:
        freq = Counter(tokens)
        dl = len(tokens)
        s = 0.0
        for term, count in query_counts.items():
            if term not in idf:
                continue
            tf = freq.get(term, 0)
            if tf == 0:
                continue
            s += float(count) * idf[term] * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl))
        scores.append(s)
    return scores


def bm25_reference_ranking(
    docs_tokens: list[list[str]],
    query_tokens: list[str],
    k1: float = 1.2,
    b: float = 0.75,
    epsilon: float = 0.25,
) -> list[tuple[int, float]]:
    """All documents with positive score as (ordinal, score), sorted by
    (score desc, ordinal asc)."""
    scores = bm25_reference_scores(docs_tokens, query_tokens, k1, b, epsilon)
    matched = [(i, s) for i, s in enumerate(scores) if s > 0.0]
    matched.sort(key=lambda pair: (-pair[1], pair[0]))
    return matched


def ndcg_reference(ranked_ids: list[str], relevant: set[str], k: int = 10) -> float:
    """NDCG@k via explicit gain vectors and math.log(x, 2)."""
    gains = [1 if pid in relevant else 0 for pid in ranked_ids[:k]]
    ideal = sorted((1 for _ in relevant), reverse=True)[:k]

    def dcg(gain_list):
        total = 0.0
        for position, gain in enumerate(gain_list, start=1):
            total += gain / math.log(position + 1, 2)
        return total

    denominator = dcg(ideal)
    if denominator == 0.0:
        return 0.0
    return dcg(gains) / denominator
