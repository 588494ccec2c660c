"""Scoring backends.

Each backend maps (query, passage) pairs to relevance probabilities in
[0, 1] and scores every pair independently, so splitting a request into
batches can never change a score.
"""

from __future__ import annotations

import math
import re

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _tokens(text: str) -> set[str]:
    return {t.lower() for t in _WORD_RE.findall(text)}


class StubScorer:
    """Deterministic lexical-overlap scorer: fraction of distinct query
    tokens present in the passage. No model download, no accelerator."""

    model_name = "stub-lexical-overlap"

    def score_pairs(self, pairs: list[tuple[str, str]]) -> list[float]:
        out = []
        for query, passage in pairs:
            q = _tokens(query)
            out.append(len(q & _tokens(passage)) / max(1, len(q)))
        return out


class CrossEncoderScorer:
    """Wraps a pretrained cross-encoder; the relevance logit is mapped
    through a sigmoid so outputs are probabilities."""

    def __init__(self, model_id: str, device: str = "cpu"):
        try:
            from sentence_transformers import CrossEncoder
        except ImportError as exc:
            raise RuntimeError(
                "sentence-transformers is required for non-stub mode "
                "(pip install 'scorer-service[models]')"
            ) from exc
        try:
            self._model = CrossEncoder(model_id, device=device)
        except Exception as exc:
            raise RuntimeError(f"failed to load model {model_id!r}: {exc}") from exc
        self.model_name = model_id

    def score_pairs(self, pairs: list[tuple[str, str]]) -> list[float]:
        raw = self._model.predict([list(p) for p in pairs], convert_to_numpy=True)
        out = []
        for value in raw.reshape(-1).tolist():
            # Models with a sigmoid activation already emit [0, 1]; raw
            # logits get squashed here.
            prob = value if 0.0 <= value <= 1.0 else 1.0 / (1.0 + math.exp(-value))
            out.append(min(1.0, max(0.0, prob)))
        return out


def build_backend(model_id: str, device: str, stub_mode: bool):
    if stub_mode:
        return StubScorer()
    return CrossEncoderScorer(model_id, device=device)
