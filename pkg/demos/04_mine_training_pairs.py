#!/usr/bin/env python3
# Hard-negative mining: every relevant passage becomes a positive sample
# paired with negatives drawn from the query's top BM25 candidates. The
# hydrated JSONL feeds the reranker fine-tuning script directly.

import tempfile
from collections import Counter
from pathlib import Path

from passagerank import Analyzer, build_index, mine_pairs
from passagerank.corpus import iter_texts, load_texts
from passagerank.evaluation import read_qrels
from passagerank.mining import write_pairs_jsonl, write_pairs_tsv

FIXTURE = Path(__file__).resolve().parent.parent / "data" / "fixture"

analyzer = Analyzer()
index = build_index(iter_texts(FIXTURE / "corpus.tsv"), analyzer)
queries = load_texts(FIXTURE / "queries.tsv")
qrels = read_qrels(FIXTURE / "qrels.tsv")

# The production recipe is n_neg=100 from a pool of 2000; the fixture is
# tiny, so a query's eligible pool is exhausted and all of it is used.
samples = list(mine_pairs(qrels, queries, index, analyzer, n_neg=100, pool=2000, seed=42))

labels = Counter(s.label for s in samples)
print(f"mined {len(samples)} samples: {labels[1]} positives, {labels[0]} negatives")

by_query = Counter(s.query_id for s in samples)
qid, count = next(iter(by_query.items()))
print(f"{qid}: {count} samples, e.g.")
for sample in [s for s in samples if s.query_id == qid][:4]:
    print(f"  label={sample.label} passage={sample.passage_id}")

with tempfile.TemporaryDirectory() as tmp:
    tsv = Path(tmp) / "pairs.tsv"
    jsonl = Path(tmp) / "pairs.jsonl"
    write_pairs_tsv(samples, tsv)
    write_pairs_jsonl(samples, jsonl, queries, load_texts(FIXTURE / "corpus.tsv"))
    print(f"\nwrote {tsv.name} ({tsv.stat().st_size} bytes) "
          f"and hydrated {jsonl.name} ({jsonl.stat().st_size} bytes)")
