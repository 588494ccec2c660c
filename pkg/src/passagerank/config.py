"""Pipeline configuration loaded from a TOML document.

Example::

    [paths]
    corpus = "data/fixture/corpus.tsv"
    queries = "data/fixture/queries.tsv"
    qrels = "data/fixture/qrels.tsv"
    domains = "data/fixture/domains.tsv"   # optional
    index = "out/fixture.idx"
    output_dir = "out"

    [analyzer]
    lowercase = true
    stemmer = "identity"            # identity | dictionary | suffix-rules
    # stopwords = "path.txt"        # or "default" for the bundled Polish list
    # stem_table = "stems.tsv"

    [bm25]
    k1 = 1.2
    b = 0.75
    epsilon = 0.25

    [search]
    k = 1000

    [rerank]
    batch_size = 32
    # budget = 3000                 # omit for no limit
    [rerank.budgets]                # per-domain overrides; omitted = unlimited
    wiki-trivia = 3000
    legal-questions = 1500

    [[scorers]]
    name = "overlap"
    kind = "lexical-overlap"

    [eval]
    k = 10

Every key has a default; commands validate only the paths they use.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bm25 import Bm25Params
from .errors import ConfigError
from .scorers import SCORER_KINDS, ScorerHandle
from .text import AnalyzerConfig, default_stopwords_path


@dataclass
class PipelinePaths:
    corpus: Path | None = None
    queries: Path | None = None
    qrels: Path | None = None
    domains: Path | None = None
    index: Path | None = None
    output_dir: Path = Path(".")


@dataclass
class PipelineConfig:
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    bm25: Bm25Params = field(default_factory=Bm25Params)
    paths: PipelinePaths = field(default_factory=PipelinePaths)
    scorers: tuple[ScorerHandle, ...] = ()
    rerank_budget: int | None = None
    domain_budgets: dict[str, int] = field(default_factory=dict)
    batch_size: int = 32
    search_k: int = 1000
    eval_k: int = 10


def _expect_table(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table")
    return value


def _path_or_none(table: dict, key: str, base: Path) -> Path | None:
    value = table.get(key)
    if value is None:
        return None
    return (base / str(value)).resolve() if not Path(str(value)).is_absolute() else Path(str(value))


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config file. Relative paths resolve
    against the config file's directory."""
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    base = path.parent

    paths_t = _expect_table(doc, "paths")
    paths = PipelinePaths(
        corpus=_path_or_none(paths_t, "corpus", base),
        queries=_path_or_none(paths_t, "queries", base),
        qrels=_path_or_none(paths_t, "qrels", base),
        domains=_path_or_none(paths_t, "domains", base),
        index=_path_or_none(paths_t, "index", base),
        output_dir=_path_or_none(paths_t, "output_dir", base) or Path("."),
    )

    ana_t = _expect_table(doc, "analyzer")
    stopwords = ana_t.get("stopwords")
    if stopwords == "default":
        stopword_path: Path | None = default_stopwords_path()
    elif stopwords is not None:
        stopword_path = _path_or_none(ana_t, "stopwords", base)
    else:
        stopword_path = None
    analyzer_cfg = AnalyzerConfig(
        lowercase=bool(ana_t.get("lowercase", True)),
        stemmer=str(ana_t.get("stemmer", "identity")),
        stem_table_path=_path_or_none(ana_t, "stem_table", base),
        stopword_path=stopword_path,
    )

    bm25_t = _expect_table(doc, "bm25")
    try:
        bm25 = Bm25Params(
            k1=float(bm25_t.get("k1", 1.2)),
            b=float(bm25_t.get("b", 0.75)),
            epsilon=float(bm25_t.get("epsilon", 0.25)),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    handles = []
    for i, entry in enumerate(doc.get("scorers", [])):
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise ConfigError(f"{path}: [[scorers]] entry {i} needs 'name' and 'kind'")
        if entry["kind"] not in SCORER_KINDS:
            raise ConfigError(
                f"{path}: scorer {entry['name']!r} has unknown kind {entry['kind']!r}"
            )
        handles.append(
            ScorerHandle(
                name=str(entry["name"]),
                kind=str(entry["kind"]),
                endpoint=str(entry.get("endpoint", "")),
                value=float(entry.get("value", 0.5)),
                timeout=float(entry.get("timeout", 120.0)),
                retries=int(entry.get("retries", 2)),
                max_inflight=int(entry.get("max_inflight", 4)),
            )
        )
    names = [h.name for h in handles]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: scorer names must be unique")

    rerank_t = _expect_table(doc, "rerank")
    budget = rerank_t.get("budget")
    if budget is not None and int(budget) < 1:
        raise ConfigError(f"{path}: rerank budget must be positive")
    domain_budgets = {}
    for domain, value in _expect_table(rerank_t, "budgets").items():
        if int(value) < 1:
            raise ConfigError(f"{path}: budget for domain {domain!r} must be positive")
        domain_budgets[str(domain)] = int(value)

    search_t = _expect_table(doc, "search")
    eval_t = _expect_table(doc, "eval")

    return PipelineConfig(
        analyzer=analyzer_cfg,
        bm25=bm25,
        paths=paths,
        scorers=tuple(handles),
        rerank_budget=None if budget is None else int(budget),
        domain_budgets=domain_budgets,
        batch_size=int(rerank_t.get("batch_size", 32)),
        search_k=int(search_t.get("k", 1000)),
        eval_k=int(eval_t.get("k", 10)),
    )
