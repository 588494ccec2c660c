#!/usr/bin/env python3
# The full two-stage pipeline on the bundled fixture: BM25 retrieval,
# lexical-overlap reranking of the candidate head, NDCG@10 per domain
# before and after. The reranker lifts the long fully-matching passages
# that length normalization buried.

from pathlib import Path

from passagerank import Analyzer, RerankConfig, ScorerHandle, build_index, evaluate, rerank
from passagerank.corpus import iter_texts, load_texts, read_domains
from passagerank.evaluation import read_qrels, run_from_candidates
from passagerank.scorers import LexicalOverlapScorer

FIXTURE = Path(__file__).resolve().parent.parent / "data" / "fixture"

analyzer = Analyzer()
index = build_index(iter_texts(FIXTURE / "corpus.tsv"), analyzer)
queries = load_texts(FIXTURE / "queries.tsv")
passages = load_texts(FIXTURE / "corpus.tsv")
qrels = read_qrels(FIXTURE / "qrels.tsv")
domains = read_domains(FIXTURE / "domains.tsv")

# Stage 1: BM25 candidates.
first_stage = [index.retrieve_topk(analyzer.analyze(text), 50, query_id=qid)
               for qid, text in queries.items()]

# Stage 2: re-order the head of each candidate list by fused ensemble score.
# Here the ensemble is a single deterministic lexical-overlap scorer; in
# production each handle points at a cross-encoder scoring service.
cfg = RerankConfig(ensemble=(ScorerHandle("overlap", "lexical-overlap"),), budget=50)
scorer = LexicalOverlapScorer(analyzer=analyzer)
second_stage = [rerank(cand, queries[cand.query_id], cfg, passages, scorers=[scorer])
                for cand in first_stage]

for label, lists in [("BM25 alone", first_stage), ("after rerank", second_stage)]:
    report = evaluate(run_from_candidates(lists), qrels, domains=domains, k=10)
    print(f"\n{label}:")
    print(report.format_table())
