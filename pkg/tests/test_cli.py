"""CLI tests: command wiring, exit codes, sweeps, idempotence."""

import json
from pathlib import Path

import pytest

from passagerank.cli import main
from passagerank.config import load_config
from passagerank.errors import ConfigError

FIXTURE = Path(__file__).resolve().parent.parent / "data" / "fixture"


def write_config(tmp_path, **overrides) -> Path:
    """Fixture config rewritten so every artifact lands under tmp_path."""
    lines = [
        "[paths]",
        f'corpus = "{FIXTURE / "corpus.tsv"}"',
        f'queries = "{FIXTURE / "queries.tsv"}"',
        f'qrels = "{FIXTURE / "qrels.tsv"}"',
        f'domains = "{FIXTURE / "domains.tsv"}"',
        f'index = "{tmp_path / "fixture.idx"}"',
        f'output_dir = "{tmp_path}"',
        "[search]",
        "k = 50",
        "[[scorers]]",
        'name = "overlap"',
        'kind = "lexical-overlap"',
    ]
    for key, value in overrides.items():
        lines.append(f"{key} = {value}")
    path = tmp_path / "pipeline.toml"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def pipeline(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["--config", str(cfg), "index"]) == 0
    run_path = tmp_path / "bm25.tsv"
    assert main(["--config", str(cfg), "search", "--output", str(run_path)]) == 0
    return cfg, run_path, tmp_path


def test_index_reports_stats(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["--config", str(cfg), "index"]) == 0
    out = capsys.readouterr().out
    assert "200 passages" in out
    assert "avgdl" in out
    assert (tmp_path / "fixture.idx").exists()


def test_index_missing_corpus_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code = main(["--config", str(cfg), "index", "--corpus", str(tmp_path / "absent.tsv")])
    assert code == 2
    assert "absent.tsv" in capsys.readouterr().err


def test_rebuilt_index_gives_identical_results(tmp_path):
    cfg = write_config(tmp_path)
    runs = []
    for name in ("a.tsv", "b.tsv"):
        assert main(["--config", str(cfg), "index"]) == 0
        out = tmp_path / name
        assert main(["--config", str(cfg), "search", "--output", str(out)]) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]


def test_search_writes_valid_run(pipeline):
    _, run_path, _ = pipeline
    text = run_path.read_text(encoding="utf-8")
    assert text.splitlines()[0].split("\t")[0] == "q001"
    assert len({line.split("\t")[0] for line in text.splitlines()}) == 20


def test_search_k_caps_candidates(pipeline):
    cfg, _, tmp_path = pipeline
    out = tmp_path / "k2.tsv"
    assert main(["--config", str(cfg), "search", "--k", "2", "--output", str(out)]) == 0
    per_query = {}
    for line in out.read_text(encoding="utf-8").splitlines():
        qid = line.split("\t")[0]
        per_query[qid] = per_query.get(qid, 0) + 1
    assert all(count <= 2 for count in per_query.values())


def test_search_missing_index_exits_2(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["--config", str(cfg), "search"]) == 2


def test_output_independent_of_thread_count(pipeline):
    cfg, _, tmp_path = pipeline
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / f"threads{threads}.tsv"
        assert main(["--config", str(cfg), "--threads", threads,
                     "search", "--output", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_rerank_constant_scorer_preserves_order(pipeline, tmp_path):
    cfg_path = write_config(tmp_path)
    constant_cfg = tmp_path / "constant.toml"
    constant_cfg.write_text(
        cfg_path.read_text(encoding="utf-8").replace(
            'name = "overlap"\nkind = "lexical-overlap"',
            'name = "same"\nkind = "constant"\nvalue = 0.5',
        ),
        encoding="utf-8",
    )
    _, run_path, _ = pipeline
    out = tmp_path / "const.tsv"
    assert main(["--config", str(constant_cfg), "rerank", "--run-in", str(run_path), "--output", str(out)]) == 0

    def order(path):
        ids = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            qid, pid, _, _ = line.split("\t")
            ids.setdefault(qid, []).append(pid)
        return ids

    assert order(out) == order(run_path)


def test_rerank_budget_sweep_emits_suffixed_files(pipeline):
    cfg, run_path, tmp_path = pipeline
    out = tmp_path / "swept.tsv"
    assert main(["--config", str(cfg), "rerank", "--run-in", str(run_path),
                 "--budget", "2,5", "--output", str(out)]) == 0
    assert (tmp_path / "swept.b2.tsv").exists()
    assert (tmp_path / "swept.b5.tsv").exists()


def test_rerank_overlap_improves_eval(pipeline, capsys):
    cfg, run_path, tmp_path = pipeline
    out = tmp_path / "rr.tsv"
    assert main(["--config", str(cfg), "rerank", "--run-in", str(run_path), "--output", str(out)]) == 0

    json_a = tmp_path / "a.json"
    json_b = tmp_path / "b.json"
    assert main(["--config", str(cfg), "eval", "--run", str(run_path), "--json", str(json_a)]) == 0
    assert main(["--config", str(cfg), "eval", "--run", str(out), "--json", str(json_b)]) == 0
    before = json.loads(json_a.read_text(encoding="utf-8"))["overall"]
    after = json.loads(json_b.read_text(encoding="utf-8"))["overall"]
    assert after > before


def test_eval_prints_domain_table(pipeline, capsys):
    cfg, run_path, _ = pipeline
    assert main(["--config", str(cfg), "eval", "--run", str(run_path)]) == 0
    out = capsys.readouterr().out
    assert "wiki-trivia" in out
    assert "overall" in out


def test_mine_pairs_outputs_and_seed_determinism(pipeline):
    cfg, _, tmp_path = pipeline
    out1 = tmp_path / "pairs1.tsv"
    out2 = tmp_path / "pairs2.tsv"
    hydr = tmp_path / "pairs.jsonl"
    base = ["--config", str(cfg), "--seed", "7"]
    assert main(base + ["mine-pairs", "--n-neg", "5", "--pool", "20", "--output", str(out1),
                        "--hydrated", str(hydr)]) == 0
    assert main(base + ["mine-pairs", "--n-neg", "5", "--pool", "20", "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    first = json.loads(hydr.read_text(encoding="utf-8").splitlines()[0])
    assert {"query_id", "passage_id", "query", "passage", "label"} <= set(first)


def test_usage_error_exits_1():
    assert main(["index"]) == 1          # --config missing
    assert main(["no-such-command"]) == 1


def test_scorer_failure_exits_3(pipeline, tmp_path):
    cfg_path = write_config(tmp_path)
    remote_cfg = tmp_path / "remote.toml"
    remote_cfg.write_text(
        cfg_path.read_text(encoding="utf-8").replace(
            'name = "overlap"\nkind = "lexical-overlap"',
            'name = "dead"\nkind = "remote"\nendpoint = "http://127.0.0.1:1"\nretries = 0\ntimeout = 2.0',
        ),
        encoding="utf-8",
    )
    _, run_path, _ = pipeline
    code = main(["--config", str(remote_cfg), "rerank", "--run-in", str(run_path),
                 "--output", str(tmp_path / "x.tsv")])
    assert code == 3


def test_load_config_parses_fixture():
    cfg = load_config(FIXTURE / "fixture.toml")
    assert cfg.bm25.k1 == 1.2
    assert cfg.search_k == 50
    assert cfg.domain_budgets == {"wiki-trivia": 50, "legal-questions": 25}
    assert cfg.scorers[0].kind == "lexical-overlap"
    assert cfg.paths.corpus.name == "corpus.tsv"


def test_load_config_rejects_bad_budget(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[rerank.budgets]\nlegal = 0\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_rejects_duplicate_scorer_names(tmp_path):
    path = tmp_path / "dup.toml"
    path.write_text(
        '[[scorers]]\nname = "s"\nkind = "constant"\n'
        '[[scorers]]\nname = "s"\nkind = "constant"\n',
        encoding="utf-8",
    )
    with pytest.raises(ConfigError, match="unique"):
        load_config(path)


def test_load_config_rejects_unknown_scorer_kind(tmp_path):
    path = tmp_path / "kind.toml"
    path.write_text('[[scorers]]\nname = "s"\nkind = "psychic"\n', encoding="utf-8")
    with pytest.raises(ConfigError, match="psychic"):
        load_config(path)
