"""HTTP service for live clear/unclear verdicts and clarification hints.

Stateless over immutable artifacts loaded at startup; concurrent requests share
the in-memory index without locks.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .pipeline import InputError, PipelineConfig, Predictor


class ClassifyRequest(BaseModel):
    title: str
    body: str = ""
    tags: list[str] = Field(default_factory=list)


class SimilarQuestion(BaseModel):
    question_id: int
    score: float
    label: str


class Hint(BaseModel):
    clarification_text: str
    keyphrases: list[str]
    retrieval_score: float


class ClassifyResponse(BaseModel):
    label: str
    probability_unclear: float
    similar: list[SimilarQuestion]
    hints: list[Hint]


def create_app(config: PipelineConfig, model_name: str,
               defer_load: bool = False) -> FastAPI:
    """App factory; artifacts load at startup unless defer_load is set."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if not defer_load:
            load_predictor(app)
        yield

    app = FastAPI(title="clarity", lifespan=lifespan)
    app.state.predictor = None
    app.state.config = config
    app.state.model_name = model_name
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.ui_origin] if config.ui_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def load_predictor(app_obj) -> None:
        app_obj.state.predictor = Predictor(config, model_name)

    app.state.load_predictor = lambda: load_predictor(app)

    @app.get("/health")
    def health():
        predictor = app.state.predictor
        if predictor is None:
            raise HTTPException(status_code=503, detail="artifacts not loaded")
        return {
            "status": "ok",
            "config_hash": predictor.config_hash,
            "community": config.name,
            "model": model_name,
        }

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(request: ClassifyRequest):
        predictor = app.state.predictor
        if predictor is None:
            raise HTTPException(status_code=503, detail="artifacts not loaded")
        if not request.title.strip():
            raise HTTPException(status_code=400, detail="title must be nonempty")
        try:
            return predictor.classify(request.title, request.body, request.tags)
        except InputError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app


def run_service(config: PipelineConfig, model_name: str) -> None:
    import uvicorn

    app = create_app(config, model_name)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
