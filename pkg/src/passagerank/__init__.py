"""Two-stage passage retrieval: BM25 candidate generation, ensemble
reranking by score summation, and NDCG@k evaluation."""

from .bm25 import Bm25Index, Bm25Params, CandidateList, build_index, load_index, save_index
from .errors import ConfigError, DataError, IndexFormatError, PassageRankError, ScorerError
from .evaluation import (
    EvalReport,
    evaluate,
    ndcg_at_k,
    read_qrels,
    read_run,
    run_from_candidates,
    write_challenge_run,
    write_run,
)
from .mining import PairSample, mine_pairs, write_pairs_jsonl, write_pairs_tsv
from .rerank import RerankConfig, fuse, rerank
from .scorers import (
    ConstantScorer,
    LexicalOverlapScorer,
    RemoteScorer,
    ScorerHandle,
    build_scorer,
    score_lexical_overlap,
)
from .text import Analyzer, AnalyzerConfig, load_stem_table, load_stopwords, stem

__version__ = "0.1.0"

__all__ = [
    "Analyzer",
    "AnalyzerConfig",
    "Bm25Index",
    "Bm25Params",
    "CandidateList",
    "ConfigError",
    "ConstantScorer",
    "DataError",
    "EvalReport",
    "IndexFormatError",
    "LexicalOverlapScorer",
    "PairSample",
    "PassageRankError",
    "RemoteScorer",
    "RerankConfig",
    "ScorerError",
    "ScorerHandle",
    "build_index",
    "build_scorer",
    "evaluate",
    "fuse",
    "load_index",
    "load_stem_table",
    "load_stopwords",
    "mine_pairs",
    "ndcg_at_k",
    "read_qrels",
    "read_run",
    "rerank",
    "run_from_candidates",
    "save_index",
    "score_lexical_overlap",
    "stem",
    "write_challenge_run",
    "write_pairs_jsonl",
    "write_pairs_tsv",
    "write_run",
]
