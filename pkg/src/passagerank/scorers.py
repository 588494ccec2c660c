"""Pair scorers: remote HTTP ensemble members plus local deterministic kinds.

Every scorer exposes ``score_batch(pairs) -> list[float]`` where pairs are
(query, passage) strings and each score lies in [0, 1]. The remote kind
speaks the stateless wire protocol::

    POST {endpoint}/score   {"pairs": [{"query": "...", "passage": "..."}]}
    -> 200                  {"scores": [0.0 .. 1.0, ...]}
    GET  {endpoint}/health  -> {"status": "ok", "model": "<name>"}

One service instance serves one ensemble member; model identity is baked
into the endpoint.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import requests

from .errors import ConfigError, ScorerError
from .text import Analyzer

REMOTE = "remote"
LEXICAL_OVERLAP = "lexical-overlap"
CONSTANT = "constant"
SCORER_KINDS = (REMOTE, LEXICAL_OVERLAP, CONSTANT)

Pair = tuple[str, str]


@dataclass(frozen=True)
class ScorerHandle:
    """Declarative description of one ensemble member."""

    name: str
    kind: str
    endpoint: str = ""
    value: float = 0.5
    timeout: float = 120.0
    retries: int = 2
    max_inflight: int = 4


class Scorer(Protocol):
    name: str

    def score_batch(self, pairs: Sequence[Pair]) -> list[float]: ...


def score_lexical_overlap(query_tokens: Iterable[str], passage_tokens: Iterable[str]) -> float:
    """Fraction of distinct query tokens present in the passage, in [0, 1]."""
    q = set(query_tokens)
    return len(q & set(passage_tokens)) / max(1, len(q))


class LexicalOverlapScorer:
    """Deterministic scorer: query-term coverage of the passage.

    Lets the two-stage pipeline run end to end without any model service.
    """

    def __init__(self, name: str = "lexical-overlap", analyzer: Analyzer | None = None):
        self.name = name
        self._analyzer = analyzer or Analyzer()

    def score_batch(self, pairs: Sequence[Pair]) -> list[float]:
        return [
            score_lexical_overlap(self._analyzer.analyze(q), self._analyzer.analyze(p))
            for q, p in pairs
        ]


class ConstantScorer:
    """Scores every pair the same; useful to exercise tie handling."""

    def __init__(self, name: str = "constant", value: float = 0.5):
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"constant scorer value must be in [0, 1], got {value}")
        self.name = name
        self.value = float(value)

    def score_batch(self, pairs: Sequence[Pair]) -> list[float]:
        return [self.value] * len(pairs)


class RemoteScorer:
    """HTTP client for one scoring service.

    Transport failures are retried idempotently up to ``retries`` extra
    attempts; protocol violations (non-2xx, malformed body, length
    mismatch, out-of-range score) fail immediately. A semaphore bounds
    concurrent in-flight requests per handle.
    """

    def __init__(
        self,
        name: str,
        endpoint: str,
        timeout: float = 120.0,
        retries: int = 2,
        max_inflight: int = 4,
        session: requests.Session | None = None,
    ):
        if not endpoint:
            raise ConfigError(f"remote scorer '{name}' needs an endpoint")
        self.name = name
        self._base = endpoint.rstrip("/")
        self._timeout = timeout
        self._retries = retries
        self._sem = threading.Semaphore(max_inflight)
        self._session = session or requests.Session()

    def score_batch(self, pairs: Sequence[Pair]) -> list[float]:
        if not pairs:
            raise ScorerError(self.name, "refusing to score an empty batch")
        body = {"pairs": [{"query": q, "passage": p} for q, p in pairs]}
        last_exc: Exception | None = None
        for _ in range(self._retries + 1):
            try:
                with self._sem:
                    resp = self._session.post(f"{self._base}/score", json=body, timeout=self._timeout)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            return self._parse_response(resp, len(pairs))
        raise ScorerError(
            self.name, f"transport failure after {self._retries + 1} attempts: {last_exc}"
        )

    def _parse_response(self, resp: requests.Response, expected: int) -> list[float]:
        if not 200 <= resp.status_code < 300:
            raise ScorerError(self.name, f"HTTP {resp.status_code} from {self._base}/score")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ScorerError(self.name, f"malformed response body: {exc}") from exc
        scores = payload.get("scores") if isinstance(payload, dict) else None
        if not isinstance(scores, list):
            raise ScorerError(self.name, "response missing 'scores' list")
        if len(scores) != expected:
            raise ScorerError(
                self.name, f"length mismatch: sent {expected} pairs, got {len(scores)} scores"
            )
        out: list[float] = []
        for s in scores:
            if not isinstance(s, (int, float)) or isinstance(s, bool):
                raise ScorerError(self.name, f"non-numeric score {s!r}")
            if not 0.0 <= s <= 1.0:
                raise ScorerError(self.name, f"score {s} outside [0, 1]")
            out.append(float(s))
        return out

    def health(self) -> dict:
        """GET /health; raises ScorerError if the service is unreachable or unhealthy."""
        try:
            resp = self._session.get(f"{self._base}/health", timeout=self._timeout)
        except requests.RequestException as exc:
            raise ScorerError(self.name, f"health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise ScorerError(self.name, f"health check returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ScorerError(self.name, f"malformed health body: {exc}") from exc


def build_scorer(handle: ScorerHandle, analyzer: Analyzer | None = None) -> Scorer:
    """Instantiate the scorer a handle describes."""
    if handle.kind == REMOTE:
        return RemoteScorer(
            handle.name,
            handle.endpoint,
            timeout=handle.timeout,
            retries=handle.retries,
            max_inflight=handle.max_inflight,
        )
    if handle.kind == LEXICAL_OVERLAP:
        return LexicalOverlapScorer(handle.name, analyzer=analyzer)
    if handle.kind == CONSTANT:
        return ConstantScorer(handle.name, value=handle.value)
    raise ConfigError(f"unknown scorer kind {handle.kind!r} (expected one of {SCORER_KINDS})")
