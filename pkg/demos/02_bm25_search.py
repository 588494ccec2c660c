#!/usr/bin/env python3
# Build a BM25 index over the bundled fixture corpus and search it.
# Shows the index statistics, the IDF floor at work, and top-k retrieval.

from pathlib import Path

from passagerank import Analyzer, Bm25Params, build_index
from passagerank.corpus import iter_texts, load_texts

FIXTURE = Path(__file__).resolve().parent.parent / "data" / "fixture"

analyzer = Analyzer()
index = build_index(iter_texts(FIXTURE / "corpus.tsv"), analyzer, Bm25Params(k1=1.2, b=0.75, epsilon=0.25))
print(f"indexed {index.n_passages} passages, vocabulary {index.vocabulary_size}, avgdl {index.avgdl:.2f}")

queries = load_texts(FIXTURE / "queries.tsv")
qid, text = next(iter(queries.items()))
tokens = analyzer.analyze(text)
print(f"\nquery {qid}: {text!r} -> tokens {tokens}")

top = index.retrieve_topk(tokens, 5, query_id=qid)
print("\ntop-5 BM25 candidates:")
for rank, (pid, score) in enumerate(top.entries, start=1):
    print(f"  {rank}. {pid:<12} {score:.4f}")

# Short keyword-stuffed decoys outrank the long fully-matching passage:
# that is BM25's length normalization, and exactly what the second stage
# (see 03_rerank_and_eval.py) repairs.
print("\nper-term IDF of the query tokens:")
for token in tokens:
    print(f"  {token:<12} idf={index.term_idf(token):.4f}")
