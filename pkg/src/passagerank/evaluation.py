"""NDCG@k computation, qrels and run file I/O, per-domain reporting.

Gains are binary (a passage is relevant or not), the discount is
1/log2(rank + 1), and the ideal ranking places all relevant passages
first. A query whose relevant set is empty scores 0. The overall score
is the plain mean over all qrels queries, which equals the question-count
weighted mean of the per-domain means.

File formats (UTF-8):

    qrels   TSV  query_id\tpassage_id              one judged pair per line
    run     TSV  query_id\tpassage_id\trank\tscore grouped by query, ranks 1..n

A converter emits challenge-style output: one line per query of
space-separated ``passage_id:score`` entries, queries in input order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DataError

Run = dict[str, list[tuple[str, float]]]
Qrels = dict[str, set[str]]


def ndcg_at_k(ranked_ids: Sequence[str], relevant: set[str], k: int = 10) -> float:
    """Normalized discounted cumulative gain at cutoff k, binary gains."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(set(ranked_ids)) != len(ranked_ids):
        raise DataError("ranking contains duplicate passage ids")
    if not relevant:
        return 0.0
    dcg = 0.0
    for i, pid in enumerate(ranked_ids[:k]):
        if pid in relevant:
            dcg += 1.0 / math.log2(i + 2)
    ideal_hits = min(k, len(relevant))
    idcg = sum(1.0 / math.log2(i + 2) for i in range(ideal_hits))
    return dcg / idcg


@dataclass
class EvalReport:
    """Per-query, per-domain, and overall NDCG@k."""

    k: int
    per_query: dict[str, float]
    per_domain: dict[str, float]
    domain_counts: dict[str, int]
    overall: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "overall": self.overall,
            "domains": {
                name: {"queries": self.domain_counts[name], "ndcg": self.per_domain[name]}
                for name in self.per_domain
            },
            "per_query": self.per_query,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def format_table(self) -> str:
        width = max([len("overall")] + [len(d) for d in self.per_domain])
        lines = [f"{'domain':<{width}}  queries  ndcg@{self.k}"]
        for name in self.per_domain:
            lines.append(
                f"{name:<{width}}  {self.domain_counts[name]:>7}  {self.per_domain[name]:.4f}"
            )
        lines.append(f"{'overall':<{width}}  {sum(self.domain_counts.values()):>7}  {self.overall:.4f}")
        return "\n".join(lines)


def evaluate(
    run: Run,
    qrels: Qrels,
    domains: Mapping[str, str] | None = None,
    k: int = 10,
) -> EvalReport:
    """Score a run against qrels; queries absent from the run score 0.

    Every run query must appear in qrels. When a domain map is given it
    must cover every qrels query; without one, all queries fall into the
    single domain "all".
    """
    if not qrels:
        raise DataError("qrels is empty; nothing to evaluate")
    for qid in run:
        if qid not in qrels:
            raise DataError(f"run query {qid!r} does not appear in qrels")

    per_query: dict[str, float] = {}
    for qid, relevant in qrels.items():
        ranked = [pid for pid, _ in run.get(qid, [])]
        per_query[qid] = ndcg_at_k(ranked, relevant, k)

    grouped: dict[str, list[float]] = {}
    for qid in per_query:
        if domains is None:
            domain = "all"
        else:
            try:
                domain = domains[qid]
            except KeyError:
                raise DataError(f"query {qid!r} missing from the domain map") from None
        grouped.setdefault(domain, []).append(per_query[qid])

    per_domain = {name: sum(vals) / len(vals) for name, vals in grouped.items()}
    domain_counts = {name: len(vals) for name, vals in grouped.items()}
    overall = sum(per_query.values()) / len(per_query)
    return EvalReport(k, per_query, per_domain, domain_counts, overall)


def read_qrels(path: str | Path) -> Qrels:
    """Read binary-relevance judgments, preserving query order of first mention."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read qrels file {path}: {exc}") from exc
    qrels: Qrels = {}
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise DataError(f"{path}:{lineno}: expected 'query_id\\tpassage_id'")
        qrels.setdefault(parts[0], set()).add(parts[1])
    return qrels


def read_run(path: str | Path) -> Run:
    """Read and validate a run file: contiguous 1..n ranks, non-increasing
    scores, unique passages, one contiguous block per query."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read run file {path}: {exc}") from exc

    run: Run = {}
    finished: set[str] = set()
    current: str | None = None
    prev_score = 0.0
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 'query_id\\tpassage_id\\trank\\tscore'")
        qid, pid, rank_s, score_s = parts
        if not qid or not pid:
            raise DataError(f"{path}:{lineno}: empty query or passage id")
        try:
            rank = int(rank_s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer rank {rank_s!r}") from None
        try:
            score = float(score_s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric score {score_s!r}") from None

        if qid != current:
            if qid in finished:
                raise DataError(f"{path}:{lineno}: run is not grouped by query ({qid!r} reappears)")
            if current is not None:
                finished.add(current)
            current = qid
            run[qid] = []
        expected_rank = len(run[qid]) + 1
        if rank != expected_rank:
            raise DataError(f"{path}:{lineno}: rank {rank} out of sequence (expected {expected_rank})")
        if any(pid == existing for existing, _ in run[qid]):
            raise DataError(f"{path}:{lineno}: duplicate passage {pid!r} for query {qid!r}")
        if rank > 1 and score > prev_score:
            raise DataError(f"{path}:{lineno}: scores must be non-increasing within a query")
        prev_score = score
        run[qid].append((pid, score))
    return run


def write_run(run: Run, path: str | Path) -> None:
    """Write a run file; ``read_run(write_run(x))`` round-trips exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for qid, entries in run.items():
            for rank, (pid, score) in enumerate(entries, start=1):
                fh.write(f"{qid}\t{pid}\t{rank}\t{float(score)!r}\n")


def write_challenge_run(run: Run, path: str | Path) -> None:
    """Write one line per query: space-separated ``passage_id:score`` entries."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for entries in run.values():
            fh.write(" ".join(f"{pid}:{float(score)!r}" for pid, score in entries))
            fh.write("\n")


def run_from_candidates(candidate_lists) -> Run:
    """Assemble a run from CandidateList objects, preserving their order."""
    run: Run = {}
    for cand in candidate_lists:
        if cand.query_id in run:
            raise DataError(f"duplicate query id {cand.query_id!r} in candidate lists")
        run[cand.query_id] = list(cand.entries)
    return run
