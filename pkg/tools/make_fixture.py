"""Regenerate the bundled demo/test fixture under data/fixture/.

The corpus is built so the second stage provably helps: each query has a
long passage containing every query term (the relevant one) and nine
short decoys that repeat a single query term. BM25's length
normalization puts the decoys on top; a lexical-overlap reranker ranks
the full-coverage passage first. Running this script is idempotent.
"""

from __future__ import annotations

import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "fixture"

SYLLABLES = [
    "ba", "ce", "da", "fo", "ga", "ja", "ko", "lu", "ma", "ni",
    "po", "ra", "so", "tu", "wa", "ze", "czy", "szo", "rza", "łek",
]

N_QUERIES = 20
GROUP_SIZE = 10          # passages per query: relevant + decoys
RELEVANT_LEN = 60        # long passage, penalized by length normalization
DECOY_LEN = 5            # short passage, term repeated
DECOY_TF = 4

DOMAINS = [
    ("wiki-trivia", range(1, 11)),
    ("legal-questions", range(11, 17)),
    ("allegro-faq", range(17, 21)),
]


def make_word(rng: random.Random, used: set[str]) -> str:
    while True:
        word = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4)))
        if word not in used:
            used.add(word)
            return word


def main() -> None:
    rng = random.Random(20230)
    used: set[str] = set()
    fillers = [make_word(rng, used) for _ in range(120)]

    corpus_lines: list[str] = []
    query_lines: list[str] = []
    qrels_lines: list[str] = []
    domain_lines: list[str] = []

    domain_of = {}
    for name, ids in DOMAINS:
        for i in ids:
            domain_of[i] = name

    for i in range(1, N_QUERIES + 1):
        qid = f"q{i:03d}"
        terms = [make_word(rng, used) for _ in range(3)]
        query_lines.append(f"{qid}\t{' '.join(terms)}")
        domain_lines.append(f"{qid}\t{domain_of[i]}")

        # Fully matching relevant passage, long.
        rel_id = f"p{i:03d}_rel"
        body = terms + [rng.choice(fillers) for _ in range(RELEVANT_LEN - len(terms))]
        rng.shuffle(body)
        corpus_lines.append(f"{rel_id}\t{' '.join(body)}")
        qrels_lines.append(f"{qid}\t{rel_id}")

        n_decoys = GROUP_SIZE - 1
        if i % 4 == 0:
            # Second relevant passage covering two of three terms.
            rel2_id = f"p{i:03d}_rel2"
            body2 = terms[:2] + [rng.choice(fillers) for _ in range(RELEVANT_LEN - 2)]
            rng.shuffle(body2)
            corpus_lines.append(f"{rel2_id}\t{' '.join(body2)}")
            qrels_lines.append(f"{qid}\t{rel2_id}")
            n_decoys -= 1

        for d in range(n_decoys):
            decoy_id = f"p{i:03d}_d{d}"
            body = [terms[0]] * DECOY_TF + [rng.choice(fillers) for _ in range(DECOY_LEN - DECOY_TF)]
            corpus_lines.append(f"{decoy_id}\t{' '.join(body)}")

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "corpus.tsv").write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    (OUT_DIR / "queries.tsv").write_text("\n".join(query_lines) + "\n", encoding="utf-8")
    (OUT_DIR / "qrels.tsv").write_text("\n".join(qrels_lines) + "\n", encoding="utf-8")
    (OUT_DIR / "domains.tsv").write_text("\n".join(domain_lines) + "\n", encoding="utf-8")
    print(f"wrote fixture ({len(corpus_lines)} passages, {len(query_lines)} queries) -> {OUT_DIR}")


if __name__ == "__main__":
    main()
