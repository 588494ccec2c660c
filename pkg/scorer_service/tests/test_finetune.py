"""Fine-tuning smoke tests on toy separable data (stub backend)."""

import json

import pytest
import torch

from scorer_service.finetune import (
    FinetuneConfig,
    finetune,
    load_finetune_config,
    main,
    ndcg_at_10,
    read_pairs,
)


def write_toy_pairs(path, n_queries=5, separable=True):
    """Positives share all query tokens; negatives share none."""
    lines = []
    for i in range(n_queries):
        query = f"topic{i} alpha{i} beta{i}"
        lines.append({"query_id": f"q{i}", "query": query,
                      "passage": f"about topic{i} alpha{i} beta{i} detail", "label": 1})
        for d in range(3):
            passage = f"unrelated filler{d} noise" if separable else query
            lines.append({"query_id": f"q{i}", "query": query, "passage": passage, "label": 0})
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n", encoding="utf-8")
    return path


def toy_config(tmp_path, **overrides):
    pairs = write_toy_pairs(tmp_path / "pairs.jsonl")
    defaults = dict(
        pairs_path=pairs,
        out_dir=tmp_path / "ckpt",
        model_id="stub",
        lr=0.5,
        warmup_steps=0,
        epochs=6,
        seed=1,
    )
    defaults.update(overrides)
    return FinetuneConfig(**defaults)


def test_smoke_single_epoch(tmp_path):
    best = finetune(toy_config(tmp_path, epochs=1))
    assert best.exists()
    payload = torch.load(best, weights_only=False)
    assert payload["epoch"] == 1
    assert payload["loss"] == payload["loss"]  # finite, not NaN
    assert payload["loss"] < float("inf")


def test_loss_decreases_monotonically_on_separable_data(tmp_path):
    cfg = toy_config(tmp_path, epochs=8)
    finetune(cfg)
    log_lines = (cfg.out_dir / "train_log.tsv").read_text(encoding="utf-8").splitlines()[1:]
    losses = [float(line.split("\t")[2]) for line in log_lines]
    assert len(losses) == 8
    assert all(b < a for a, b in zip(losses, losses[1:])), losses


def test_best_symlink_points_at_best_dev_ndcg(tmp_path):
    cfg = toy_config(tmp_path, epochs=4)
    best = finetune(cfg)
    link = cfg.out_dir / "best"
    assert link.exists()
    chosen = torch.load(link, weights_only=False)
    assert chosen["dev_ndcg10"] == torch.load(best, weights_only=False)["dev_ndcg10"]
    all_ndcg = [
        torch.load(p, weights_only=False)["dev_ndcg10"]
        for p in sorted(cfg.out_dir.glob("epoch_*.pt"))
    ]
    assert chosen["dev_ndcg10"] == max(all_ndcg)


def test_checkpoint_per_epoch(tmp_path):
    cfg = toy_config(tmp_path, epochs=3)
    finetune(cfg)
    assert sorted(p.name for p in cfg.out_dir.glob("epoch_*.pt")) == [
        "epoch_001.pt", "epoch_002.pt", "epoch_003.pt",
    ]


def test_label_outside_binary_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"query": "q", "passage": "p", "label": 2}) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":1"):
        read_pairs(path)


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"query": "q", "passage": "p", "label": 1}\nnot json\n', encoding="utf-8")
    with pytest.raises(ValueError, match=":2"):
        read_pairs(path)


def test_missing_fields_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"query": "q"}) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="passage"):
        read_pairs(path)


def test_ndcg_at_10_perfect_and_inverted():
    from scorer_service.finetune import PairRecord

    records = [
        PairRecord("q", "q", "good", 1),
        PairRecord("q", "q", "bad", 0),
    ]
    assert ndcg_at_10(records, [0.9, 0.1]) == 1.0
    assert ndcg_at_10(records, [0.1, 0.9]) == pytest.approx(1.0 / torch.log2(torch.tensor(3.0)).item())


def test_config_file_round_trip(tmp_path):
    pairs = write_toy_pairs(tmp_path / "pairs.jsonl")
    cfg_path = tmp_path / "ft.toml"
    cfg_path.write_text(
        f'pairs = "{pairs.name}"\nout_dir = "ckpt"\nlr = 1e-6\nwarmup_steps = 2000\nepochs = 10\n',
        encoding="utf-8",
    )
    cfg = load_finetune_config(cfg_path)
    assert cfg.pairs_path == pairs
    assert cfg.lr == 1e-6
    assert cfg.warmup_steps == 2000
    assert cfg.epochs == 10
    assert cfg.model_id == "stub"


def test_cli_entry_trains_and_reports_best(tmp_path, capsys):
    pairs = write_toy_pairs(tmp_path / "pairs.jsonl")
    cfg_path = tmp_path / "ft.toml"
    cfg_path.write_text(
        f'pairs = "{pairs.name}"\nout_dir = "ckpt"\nlr = 0.5\nwarmup_steps = 0\nepochs = 2\n',
        encoding="utf-8",
    )
    assert main([str(cfg_path)]) == 0
    assert "best checkpoint" in capsys.readouterr().out


def test_cli_entry_bad_pairs_exits_2(tmp_path, capsys):
    cfg_path = tmp_path / "ft.toml"
    cfg_path.write_text('pairs = "missing.jsonl"\n', encoding="utf-8")
    assert main([str(cfg_path)]) == 2
    assert "error" in capsys.readouterr().err
