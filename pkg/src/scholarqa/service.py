"""HTTP service exposing the pipeline: POST /ask and GET /health.

Every response, success or error, carries a request_id that also appears
in the structured request log. Pipeline executions run in a thread pool
behind a global concurrency cap.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
import time
import uuid

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .config import Settings
from .curation import Question
from .errors import ApiError, PipelineError, ProviderError, TransportError
from .pipeline import PipelineDeps, ask, build_deps

logger = logging.getLogger(__name__)


class AskRequest(BaseModel):
    question: str


class Citation(BaseModel):
    title: str
    url: str
    citation_count: int | None = None


class AskResponse(BaseModel):
    answer_html: str
    citations: list[Citation]
    outcome: str
    request_id: str
    trace: dict | None = None  # only populated when debug traces are enabled


def _error_status(exc: PipelineError) -> int:
    if isinstance(exc.cause, ProviderError):
        return 502
    if isinstance(exc.cause, (TransportError, ApiError)):
        return 503
    return 500


def create_app(settings: Settings | None = None,
               deps: PipelineDeps | None = None) -> FastAPI:
    """Build the application; dependencies are constructed at startup."""
    if settings is None:
        settings = Settings.load()

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.settings = settings
        app.state.deps = deps or build_deps(settings)
        app.state.semaphore = asyncio.Semaphore(settings.max_concurrency)
        app.state.ready = True
        yield

    app = FastAPI(title="scholarqa", version=__version__, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def request_context(request: Request, call_next):
        request_id = uuid.uuid4().hex
        request.state.request_id = request_id
        start = time.perf_counter()
        response = await call_next(request)
        response.headers["x-request-id"] = request_id
        logger.info(json.dumps({
            "request_id": request_id,
            "method": request.method,
            "path": request.url.path,
            "status": response.status_code,
            "seconds": round(time.perf_counter() - start, 4),
        }, sort_keys=True))
        return response

    def _error(request: Request, status: int, message: str) -> JSONResponse:
        request_id = getattr(request.state, "request_id", "")
        return JSONResponse(status_code=status,
                            content={"error": message, "request_id": request_id})

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(request, 400, f"invalid request body: {exc.errors()[:1]}")

    @app.exception_handler(Exception)
    async def on_unhandled(request: Request, exc: Exception):
        logger.exception("unhandled error")
        return _error(request, 500, "internal error")

    @app.get("/health")
    async def health(request: Request):
        if not getattr(app.state, "ready", False):
            return _error(request, 503, "starting up")
        return {"status": "ok", "version": __version__}

    @app.post("/ask", response_model=AskResponse, response_model_exclude_none=True)
    async def ask_endpoint(body: AskRequest, request: Request):
        request_id = request.state.request_id
        if not getattr(app.state, "ready", False):
            return _error(request, 503, "starting up")
        question_text = body.question.strip()
        limit = app.state.settings.question_max_chars
        if not question_text:
            return _error(request, 400, "question must be non-empty")
        if len(body.question) > limit:
            return _error(request, 400, f"question exceeds {limit} characters")
        try:
            async with app.state.semaphore:
                bundle, trace = await run_in_threadpool(
                    ask, Question(text=body.question), app.state.deps)
        except PipelineError as exc:
            logger.warning(json.dumps({
                "request_id": request_id,
                "stage": exc.stage,
                "error": str(exc.cause),
            }, sort_keys=True))
            return _error(request, _error_status(exc), str(exc))
        counts = {p.url: p.citation_count for p in bundle.used_papers}
        response = AskResponse(
            answer_html=bundle.answer_text,
            citations=[Citation(title=t, url=u, citation_count=counts.get(u))
                       for t, u in bundle.citations],
            outcome=trace.outcome,
            request_id=request_id,
        )
        if app.state.settings.debug_traces:
            response.trace = trace.to_dict()
        return response

    return app
