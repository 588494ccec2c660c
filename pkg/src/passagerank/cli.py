"""Command-line entry point wiring all pipeline stages.

Commands: index, search, rerank, eval, mine-pairs. Exit codes: 0 success,
1 usage error, 2 data/config error, 3 scorer error. All commands are
deterministic given identical inputs, seed, and thread count.
"""

from __future__ import annotations

import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import bm25 as bm25_mod
from . import mining
from .config import PipelineConfig, load_config
from .corpus import iter_texts, load_texts, read_domains
from .errors import ConfigError, DataError, PassageRankError, ScorerError
from .evaluation import evaluate, read_qrels, read_run, run_from_candidates, write_run
from .rerank import RerankConfig, rerank
from .scorers import build_scorer
from .text import Analyzer

log = logging.getLogger("passagerank")


def _require(path: Path | None, what: str) -> Path:
    if path is None:
        raise ConfigError(f"no {what} path configured (set [paths].{what} or pass the flag)")
    if not path.exists():
        raise DataError(f"{what} path does not exist: {path}")
    return path


def _load(ctx) -> PipelineConfig:
    cfg_path = ctx.obj["config_path"]
    if cfg_path is None:
        raise click.UsageError("--config is required")
    return load_config(cfg_path)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Pipeline config (TOML).")
@click.option("--threads", type=int, default=None, help="Worker threads (default: all cores).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized steps.")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def cli(ctx, config_path, threads, seed, verbose):
    """Two-stage passage retrieval pipeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["threads"] = threads or os.cpu_count() or 1
    ctx.obj["seed"] = seed


@cli.command("index")
@click.option("--corpus", type=click.Path(), default=None, help="Override corpus path.")
@click.option("--index", "index_path", type=click.Path(), default=None, help="Override index output path.")
@click.pass_context
def cmd_index(ctx, corpus, index_path):
    """Build the BM25 index and persist it."""
    cfg = _load(ctx)
    corpus_path = _require(Path(corpus) if corpus else cfg.paths.corpus, "corpus")
    out_path = Path(index_path) if index_path else cfg.paths.index
    if out_path is None:
        raise ConfigError("no index output path configured")
    analyzer = Analyzer(cfg.analyzer)
    started = time.perf_counter()
    index = bm25_mod.build_index(iter_texts(corpus_path), analyzer, cfg.bm25)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    bm25_mod.save_index(index, out_path)
    elapsed = time.perf_counter() - started
    log.info("indexed passages=%d vocab=%d elapsed=%.2fs", index.n_passages, index.vocabulary_size, elapsed)
    click.echo(f"indexed {index.n_passages} passages, avgdl={index.avgdl:.2f} -> {out_path}")


@cli.command("search")
@click.option("--k", type=int, default=None, help="Candidates per query (default from config).")
@click.option("--queries", type=click.Path(), default=None, help="Override queries path.")
@click.option("--index", "index_path", type=click.Path(), default=None, help="Override index path.")
@click.option("--output", type=click.Path(), default=None, help="Run file to write.")
@click.pass_context
def cmd_search(ctx, k, queries, index_path, output):
    """First-stage retrieval: write a BM25 run file."""
    cfg = _load(ctx)
    k = k or cfg.search_k
    queries_path = _require(Path(queries) if queries else cfg.paths.queries, "queries")
    idx_path = _require(Path(index_path) if index_path else cfg.paths.index, "index")
    out_path = Path(output) if output else cfg.paths.output_dir / "bm25_run.tsv"

    analyzer = Analyzer(cfg.analyzer)
    started = time.perf_counter()
    index = bm25_mod.load_index(idx_path)
    query_texts = load_texts(queries_path)
    log.info("loaded index passages=%d, queries=%d", index.n_passages, len(query_texts))

    def one(item):
        qid, text = item
        return index.retrieve_topk(analyzer.analyze(text), k, query_id=qid)

    with ThreadPoolExecutor(max_workers=ctx.obj["threads"]) as pool:
        results = list(pool.map(one, query_texts.items()))
    run = run_from_candidates(results)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_run(run, out_path)
    elapsed = time.perf_counter() - started
    log.info("search queries=%d k=%d elapsed=%.2fs", len(query_texts), k, elapsed)
    click.echo(f"wrote {len(run)} query rankings -> {out_path}")


def _parse_budgets(raw: str) -> list[int]:
    try:
        budgets = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"--budget expects integers, got {raw!r}") from None
    if not budgets or any(b < 1 for b in budgets):
        raise click.UsageError("--budget values must be positive integers")
    return budgets


@cli.command("rerank")
@click.option("--run-in", type=click.Path(), required=True, help="First-stage run file.")
@click.option("--budget", "budget_spec", default=None, help="Comma list; one output per budget.")
@click.option("--output", type=click.Path(), default=None, help="Output run file (suffixed per budget).")
@click.pass_context
def cmd_rerank(ctx, run_in, budget_spec, output):
    """Second-stage reranking of a run file with the configured ensemble."""
    cfg = _load(ctx)
    if not cfg.scorers:
        raise ConfigError("no [[scorers]] configured for reranking")
    run_path = _require(Path(run_in), "run-in")
    corpus_path = _require(cfg.paths.corpus, "corpus")
    queries_path = _require(cfg.paths.queries, "queries")
    out_base = Path(output) if output else cfg.paths.output_dir / "reranked_run.tsv"

    analyzer = Analyzer(cfg.analyzer)
    run = read_run(run_path)
    query_texts = load_texts(queries_path)
    passage_texts = load_texts(corpus_path)
    domains = read_domains(cfg.paths.domains) if cfg.paths.domains else {}
    scorers = [build_scorer(h, analyzer=analyzer) for h in cfg.scorers]

    def budget_for(qid: str, override: int | None) -> int | None:
        if override is not None:
            return override
        domain = domains.get(qid)
        if domain is not None and domain in cfg.domain_budgets:
            return cfg.domain_budgets[domain]
        return cfg.rerank_budget

    def process(override: int | None, out_path: Path) -> None:
        started = time.perf_counter()

        def one(item):
            qid, entries = item
            candidates = bm25_mod.CandidateList(qid, entries)
            rcfg = RerankConfig(
                ensemble=cfg.scorers,
                budget=budget_for(qid, override),
                batch_size=cfg.batch_size,
            )
            try:
                text = query_texts[qid]
            except KeyError:
                raise DataError(f"run query {qid!r} has no text in {queries_path}") from None
            return rerank(candidates, text, rcfg, passage_texts, scorers=scorers)

        with ThreadPoolExecutor(max_workers=ctx.obj["threads"]) as pool:
            results = list(pool.map(one, run.items()))
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_run(run_from_candidates(results), out_path)
        log.info(
            "reranked queries=%d budget=%s elapsed=%.2fs",
            len(run), override if override is not None else "config", time.perf_counter() - started,
        )
        click.echo(f"wrote reranked run -> {out_path}")

    if budget_spec is None:
        process(None, out_base)
    else:
        for b in _parse_budgets(budget_spec):
            suffixed = out_base.with_name(f"{out_base.stem}.b{b}{out_base.suffix}")
            process(b, suffixed)


@cli.command("eval")
@click.option("--run", "run_path", type=click.Path(), required=True, help="Run file to score.")
@click.option("--k", type=int, default=None, help="NDCG cutoff (default from config).")
@click.option("--json", "json_path", type=click.Path(), default=None, help="Also write the report as JSON.")
@click.pass_context
def cmd_eval(ctx, run_path, k, json_path):
    """Score a run file against qrels; prints per-domain and overall NDCG."""
    cfg = _load(ctx)
    qrels_path = _require(cfg.paths.qrels, "qrels")
    run = read_run(_require(Path(run_path), "run"))
    qrels = read_qrels(qrels_path)
    domains = read_domains(cfg.paths.domains) if cfg.paths.domains else None
    report = evaluate(run, qrels, domains=domains, k=k or cfg.eval_k)
    click.echo(report.format_table())
    if json_path:
        Path(json_path).parent.mkdir(parents=True, exist_ok=True)
        Path(json_path).write_text(report.to_json() + "\n", encoding="utf-8")
        log.info("wrote report -> %s", json_path)


@cli.command("mine-pairs")
@click.option("--n-neg", type=int, default=100, show_default=True, help="Negatives per positive.")
@click.option("--pool", type=int, default=2000, show_default=True, help="BM25 candidate pool size.")
@click.option("--output", type=click.Path(), default=None, help="Pairs TSV to write.")
@click.option("--hydrated", type=click.Path(), default=None, help="Also write hydrated JSONL.")
@click.pass_context
def cmd_mine_pairs(ctx, n_neg, pool, output, hydrated):
    """Mine labeled training pairs with BM25 hard negatives."""
    cfg = _load(ctx)
    qrels = read_qrels(_require(cfg.paths.qrels, "qrels"))
    queries_path = _require(cfg.paths.queries, "queries")
    idx_path = _require(cfg.paths.index, "index")
    out_path = Path(output) if output else cfg.paths.output_dir / "pairs.tsv"

    analyzer = Analyzer(cfg.analyzer)
    index = bm25_mod.load_index(idx_path)
    query_texts = load_texts(queries_path)
    started = time.perf_counter()
    samples = list(
        mining.mine_pairs(
            qrels, query_texts, index, analyzer,
            n_neg=n_neg, pool=pool, seed=ctx.obj["seed"],
        )
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    mining.write_pairs_tsv(samples, out_path)
    if hydrated:
        passage_texts = load_texts(_require(cfg.paths.corpus, "corpus"))
        mining.write_pairs_jsonl(samples, Path(hydrated), query_texts, passage_texts)
    positives = sum(1 for s in samples if s.label == 1)
    log.info(
        "mined pairs=%d positives=%d negatives=%d elapsed=%.2fs",
        len(samples), positives, len(samples) - positives, time.perf_counter() - started,
    )
    click.echo(f"wrote {len(samples)} pairs ({positives} positive) -> {out_path}")


def main(argv: list[str] | None = None) -> int:
    """Run the CLI with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except ScorerError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (ConfigError, DataError, PassageRankError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
