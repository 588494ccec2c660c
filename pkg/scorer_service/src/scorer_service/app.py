"""HTTP scoring service.

Wire protocol (one service instance per ensemble member):

    POST /score   {"pairs": [{"query": "...", "passage": "..."}]}
                  -> {"scores": [0.0 .. 1.0, ...]}, aligned with pairs
    GET  /health  -> {"status": "ok", "model": "<name>"}

Requests larger than the configured batch limit are refused with 413;
empty pair lists with 422. Scoring a request is atomic: there is never a
partial score vector.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .models import build_backend


@dataclass(frozen=True)
class ServiceConfig:
    model_id: str = "stub"
    device: str = "cpu"
    max_batch: int = 256
    port: int = 8100
    stub_mode: bool = True

    def __post_init__(self):
        if self.max_batch < 1:
            raise ValueError(f"max_batch must be >= 1, got {self.max_batch}")


def config_from_env() -> ServiceConfig:
    """SCORER_MODEL, SCORER_DEVICE, SCORER_MAX_BATCH, SCORER_PORT, SCORER_STUB."""
    stub = os.environ.get("SCORER_STUB", "1").lower() not in ("0", "false", "no")
    return ServiceConfig(
        model_id=os.environ.get("SCORER_MODEL", "stub"),
        device=os.environ.get("SCORER_DEVICE", "cpu"),
        max_batch=int(os.environ.get("SCORER_MAX_BATCH", "256")),
        port=int(os.environ.get("SCORER_PORT", "8100")),
        stub_mode=stub,
    )


class PairIn(BaseModel):
    query: str
    passage: str


class ScoreRequest(BaseModel):
    pairs: list[PairIn] = Field(min_length=1)


class ScoreResponse(BaseModel):
    scores: list[float]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or config_from_env()
    backend = build_backend(config.model_id, config.device, config.stub_mode)
    app = FastAPI(title="scorer-service")

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        if len(request.pairs) > config.max_batch:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.pairs)} exceeds max_batch={config.max_batch}",
            )
        pairs = [(p.query, p.passage) for p in request.pairs]
        return ScoreResponse(scores=backend.score_pairs(pairs))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "model": backend.model_name}

    return app


def serve(config: ServiceConfig | None = None) -> None:
    import uvicorn

    config = config or config_from_env()
    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port)


def main() -> None:
    serve()


if __name__ == "__main__":
    main()
