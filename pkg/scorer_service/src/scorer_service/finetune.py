"""Reranker fine-tuning on mined (query, passage, label) pairs.

Input is the hydrated JSONL produced by the mining stage (one object per
line with query/passage texts and a binary label). Training minimizes
binary cross-entropy with logits under a constant learning rate with
linear warmup; defaults are lr=1e-6, 2000 warmup steps, 10 epochs. After
every epoch a checkpoint is written and scored by NDCG@10 on the dev
pairs; the best checkpoint is exposed as ``<out_dir>/best``.

Two model backends:

* ``stub`` — a linear model over cheap lexical features of the pair,
  trained full-batch. Deterministic, CPU-only; used by tests and demos.
* any other id — a Hugging Face sequence-classification cross-encoder,
  trained minibatched (needs the optional ``models`` extra and usually a
  GPU).
"""

from __future__ import annotations

import json
import math
import re
import shutil
import sys
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class FinetuneConfig:
    pairs_path: Path
    out_dir: Path
    dev_pairs_path: Path | None = None
    model_id: str = "stub"
    lr: float = 1e-6
    warmup_steps: int = 2000
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.warmup_steps < 0:
            raise ValueError(f"warmup_steps must be >= 0, got {self.warmup_steps}")


def load_finetune_config(path: str | Path) -> FinetuneConfig:
    path = Path(path)
    doc = tomllib.loads(path.read_text(encoding="utf-8"))
    base = path.parent

    def _resolve(value):
        p = Path(str(value))
        return p if p.is_absolute() else (base / p)

    if "pairs" not in doc:
        raise ValueError(f"{path}: 'pairs' is required")
    return FinetuneConfig(
        pairs_path=_resolve(doc["pairs"]),
        out_dir=_resolve(doc.get("out_dir", "checkpoints")),
        dev_pairs_path=_resolve(doc["dev_pairs"]) if "dev_pairs" in doc else None,
        model_id=str(doc.get("model", "stub")),
        lr=float(doc.get("lr", 1e-6)),
        warmup_steps=int(doc.get("warmup_steps", 2000)),
        epochs=int(doc.get("epochs", 10)),
        batch_size=int(doc.get("batch_size", 32)),
        seed=int(doc.get("seed", 0)),
    )


@dataclass
class PairRecord:
    query_id: str
    query: str
    passage: str
    label: int


def read_pairs(path: Path) -> list[PairRecord]:
    records: list[PairRecord] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValueError(f"cannot read pairs file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        missing = {"query", "passage", "label"} - set(obj)
        if missing:
            raise ValueError(f"{path}:{lineno}: missing fields {sorted(missing)}")
        label = obj["label"]
        if label not in (0, 1):
            raise ValueError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        records.append(
            PairRecord(str(obj.get("query_id", f"line{lineno}")), obj["query"], obj["passage"], int(label))
        )
    if not records:
        raise ValueError(f"{path}: no training pairs found")
    return records


def ndcg_at_10(records: list[PairRecord], scores: list[float]) -> float:
    """Mean NDCG@10 over queries, ranking each query's pairs by score."""
    by_query: dict[str, list[tuple[float, int]]] = {}
    for record, score in zip(records, scores):
        by_query.setdefault(record.query_id, []).append((score, record.label))
    totals = []
    for items in by_query.values():
        items.sort(key=lambda pair: -pair[0])
        gains = [label for _, label in items[:10]]
        dcg = sum(g / math.log2(i + 2) for i, g in enumerate(gains))
        n_rel = sum(label for _, label in items)
        if n_rel == 0:
            totals.append(0.0)
            continue
        idcg = sum(1.0 / math.log2(i + 2) for i in range(min(10, n_rel)))
        totals.append(dcg / idcg)
    return sum(totals) / len(totals)


_WORD_SPLIT = re.compile(r"[^\W_]+", re.UNICODE)


def _features(query: str, passage: str) -> list[float]:
    q = {t.lower() for t in _WORD_SPLIT.findall(query)}
    p = {t.lower() for t in _WORD_SPLIT.findall(passage)}
    inter = len(q & p)
    union = len(q | p)
    return [
        inter / max(1, len(q)),          # query coverage
        inter / max(1, union),           # jaccard
        min(1.0, len(p) / 100.0),        # passage length, squashed
    ]


class StubModel(nn.Module):
    """Linear relevance model over lexical pair features."""

    N_FEATURES = 3

    def __init__(self):
        super().__init__()
        self.linear = nn.Linear(self.N_FEATURES, 1)

    def forward(self, feats: torch.Tensor) -> torch.Tensor:
        return self.linear(feats).squeeze(-1)


def _warmup_factor(step: int, warmup_steps: int) -> float:
    if warmup_steps <= 0 or step >= warmup_steps:
        return 1.0
    return (step + 1) / warmup_steps


def _train_stub(cfg: FinetuneConfig, records, dev_records, log_fh):
    torch.manual_seed(cfg.seed)
    model = StubModel()
    feats = torch.tensor([_features(r.query, r.passage) for r in records], dtype=torch.float32)
    labels = torch.tensor([float(r.label) for r in records])
    dev_feats = torch.tensor([_features(r.query, r.passage) for r in dev_records], dtype=torch.float32)
    loss_fn = nn.BCEWithLogitsLoss()
    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.lr)

    history = []
    for epoch in range(1, cfg.epochs + 1):
        # Full-batch descent: one optimizer step per epoch, deterministic.
        step = epoch - 1
        for group in optimizer.param_groups:
            group["lr"] = cfg.lr * _warmup_factor(step, cfg.warmup_steps)
        optimizer.zero_grad()
        loss = loss_fn(model(feats), labels)
        loss.backward()
        optimizer.step()
        log_fh.write(f"{step}\t{optimizer.param_groups[0]['lr']:.8g}\t{loss.item():.8f}\n")

        with torch.no_grad():
            dev_scores = torch.sigmoid(model(dev_feats)).tolist()
        history.append((epoch, loss.item(), ndcg_at_10(dev_records, dev_scores), model.state_dict()))
    return model, history


def _train_hf(cfg: FinetuneConfig, records, dev_records, log_fh):
    try:
        from transformers import AutoModelForSequenceClassification, AutoTokenizer
    except ImportError as exc:
        raise RuntimeError(
            "transformers is required to fine-tune a non-stub model "
            "(pip install 'scorer-service[models]')"
        ) from exc
    torch.manual_seed(cfg.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.model_id)
    model = AutoModelForSequenceClassification.from_pretrained(cfg.model_id, num_labels=1)
    loss_fn = nn.BCEWithLogitsLoss()
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr)

    def score_all(batch_records):
        model.eval()
        scores = []
        with torch.no_grad():
            for start in range(0, len(batch_records), cfg.batch_size):
                chunk = batch_records[start : start + cfg.batch_size]
                enc = tokenizer(
                    [r.query for r in chunk], [r.passage for r in chunk],
                    truncation=True, padding=True, return_tensors="pt",
                )
                scores.extend(torch.sigmoid(model(**enc).logits.reshape(-1)).tolist())
        return scores

    history = []
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(records), cfg.batch_size):
            chunk = records[start : start + cfg.batch_size]
            enc = tokenizer(
                [r.query for r in chunk], [r.passage for r in chunk],
                truncation=True, padding=True, return_tensors="pt",
            )
            targets = torch.tensor([float(r.label) for r in chunk])
            for group in optimizer.param_groups:
                group["lr"] = cfg.lr * _warmup_factor(step, cfg.warmup_steps)
            optimizer.zero_grad()
            loss = loss_fn(model(**enc).logits.reshape(-1), targets)
            loss.backward()
            optimizer.step()
            log_fh.write(f"{step}\t{optimizer.param_groups[0]['lr']:.8g}\t{loss.item():.8f}\n")
            epoch_loss += loss.item()
            n_batches += 1
            step += 1
        history.append((epoch, epoch_loss / n_batches, ndcg_at_10(dev_records, score_all(dev_records)), model.state_dict()))
    return model, history


def finetune(cfg: FinetuneConfig) -> Path:
    """Train, checkpoint every epoch, return the best checkpoint path.

    ``<out_dir>/best`` (symlink, or copy where symlinks are unavailable)
    always points at the checkpoint with the highest dev NDCG@10; ties go
    to the earlier epoch.
    """
    records = read_pairs(cfg.pairs_path)
    dev_records = read_pairs(cfg.dev_pairs_path) if cfg.dev_pairs_path else records
    cfg.out_dir.mkdir(parents=True, exist_ok=True)

    with (cfg.out_dir / "train_log.tsv").open("w", encoding="utf-8") as log_fh:
        log_fh.write("step\tlr\tloss\n")
        if cfg.model_id == "stub":
            _, history = _train_stub(cfg, records, dev_records, log_fh)
        else:
            _, history = _train_hf(cfg, records, dev_records, log_fh)

    best_path: Path | None = None
    best_metric = -1.0
    for epoch, loss, dev_ndcg, state in history:
        path = cfg.out_dir / f"epoch_{epoch:03d}.pt"
        torch.save({"epoch": epoch, "loss": loss, "dev_ndcg10": dev_ndcg,
                    "model": cfg.model_id, "state_dict": state}, path)
        if dev_ndcg > best_metric:
            best_metric = dev_ndcg
            best_path = path

    link = cfg.out_dir / "best"
    if link.is_symlink() or link.exists():
        link.unlink()
    try:
        link.symlink_to(best_path.name)
    except OSError:
        shutil.copyfile(best_path, link)
    return best_path


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    if len(args) != 1:
        print("usage: scorer-finetune <config.toml>", file=sys.stderr)
        return 1
    try:
        cfg = load_finetune_config(args[0])
        best = finetune(cfg)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"best checkpoint: {best}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
