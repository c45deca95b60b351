"""End-to-end flow: question → curation → retrieval → synthesis → answer.

Each run records a trace (curated query, retrieval summary, per-stage
timings, outcome). When retrieval finds no usable abstracts the run
short-circuits to the fixed insufficient-data message without touching
the model.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .config import Settings
from .crossref import CrossrefClient, RetrievalCache, RetrievalResult
from .curation import CuratedQuery, Question, curate_fallback, curate_with_llm
from .errors import (
    MalformedQueryError,
    NoAbstractsError,
    PipelineError,
    ProviderError,
    TransportError,
)
from .prompts import INSUFFICIENT_DATA_MESSAGE
from .providers import HttpProvider, LlmProvider, MockProvider, SamplingParams, TokenBucket
from .retry import RetryPolicy
from .synthesis import AnswerBundle, synthesize

logger = logging.getLogger(__name__)

ANSWERED = "answered"
REFUSED = "refused"
INSUFFICIENT_DATA = "insufficient_data"
ERROR = "error"


@dataclass
class PipelineDeps:
    """Everything one pipeline run needs, constructed once and shared."""

    crossref: CrossrefClient
    provider: LlmProvider | None = None
    cache: RetrievalCache | None = None
    rows: int = 15
    context_budget: int = 24_000
    offline: bool = False
    strict_citations: bool = False
    sampling: SamplingParams = SamplingParams()


@dataclass
class PipelineTrace:
    question: Question
    outcome: str = ERROR
    curated: CuratedQuery | None = None
    retrieval_summary: tuple[int, int] | None = None  # (paper count, top citation count)
    timings: list[tuple[str, float]] = field(default_factory=list)
    used_fallback: bool = False
    cache_hit: bool = False

    def to_dict(self) -> dict:
        return {
            "question": self.question.text,
            "outcome": self.outcome,
            "curated": self.curated.wire_form if self.curated else None,
            "retrieval_summary": self.retrieval_summary,
            "timings": [{"stage": s, "seconds": t} for s, t in self.timings],
            "used_fallback": self.used_fallback,
            "cache_hit": self.cache_hit,
        }


def build_deps(settings: Settings, *, offline: bool = False) -> PipelineDeps:
    """Construct pipeline dependencies from settings (shared by CLI and service)."""
    retry = RetryPolicy(settings.retry_attempts, settings.retry_backoff)
    provider: LlmProvider | None = None
    if settings.provider_kind == "http":
        limiter = None
        if settings.provider_rate_per_second > 0:
            limiter = TokenBucket(settings.provider_rate_per_second)
        provider = HttpProvider(
            settings.provider_base_url,
            settings.provider_api_key,
            chat_model=settings.chat_model,
            embedding_model=settings.embedding_model,
            retry=retry,
            rate_limiter=limiter,
        )
    elif settings.provider_kind == "mock":
        provider = MockProvider(default_reply=settings.mock_reply or None)
    elif settings.provider_kind != "none":
        raise ValueError(f"unknown provider_kind: {settings.provider_kind!r}")
    return PipelineDeps(
        crossref=CrossrefClient(settings.crossref_base_url, settings.crossref_mailto,
                                retry=retry),
        provider=provider,
        cache=RetrievalCache(settings.cache_path, settings.cache_ttl_seconds),
        rows=settings.rows,
        context_budget=settings.context_budget,
        offline=offline,
        sampling=SamplingParams(temperature=settings.chat_temperature,
                                max_tokens=settings.chat_max_tokens or None),
    )


def ask(q: Question, deps: PipelineDeps) -> tuple[AnswerBundle, PipelineTrace]:
    """Run the full pipeline for one question.

    Curation falls back to the deterministic extractor when the model
    reply is unusable (or no provider is configured). Unrecovered stage
    errors raise PipelineError tagged with the stage; the partial trace
    rides along on the exception.
    """
    trace = PipelineTrace(question=q)

    def timed(stage: str, fn):
        start = time.perf_counter()
        try:
            return fn()
        except Exception as exc:
            raise PipelineError(stage, exc, trace=trace) from exc
        finally:
            trace.timings.append((stage, time.perf_counter() - start))

    def _curate() -> CuratedQuery:
        if deps.provider is None or deps.offline:
            trace.used_fallback = True
            return curate_fallback(q)
        try:
            return curate_with_llm(q, deps.provider, sampling=deps.sampling)
        except MalformedQueryError as exc:
            logger.info("curation reply unusable (%s); using fallback", exc)
            trace.used_fallback = True
            return curate_fallback(q)

    trace.curated = timed("curation", _curate)

    def _retrieve() -> RetrievalResult | None:
        if deps.cache is not None:
            cached = deps.cache.lookup(trace.curated)
            if cached is not None:
                trace.cache_hit = True
                return cached
        if deps.offline:
            raise TransportError("offline mode and query not in cache")
        try:
            result = deps.crossref.fetch_papers(trace.curated, rows=deps.rows)
        except NoAbstractsError:
            return None
        if deps.cache is not None:
            deps.cache.store(result)
        return result

    retrieval = timed("retrieval", _retrieve)
    if retrieval is None:
        trace.outcome = INSUFFICIENT_DATA
        trace.retrieval_summary = (0, 0)
        bundle = AnswerBundle(answer_text=INSUFFICIENT_DATA_MESSAGE, citations=(),
                              used_papers=(), refused=False)
        return bundle, trace
    trace.retrieval_summary = (len(retrieval.papers),
                               retrieval.papers[0].citation_count)

    def _synthesize() -> AnswerBundle:
        if deps.provider is None:
            raise ProviderError("no model provider configured for synthesis")
        return synthesize(q, retrieval, deps.provider,
                          context_budget=deps.context_budget,
                          strict=deps.strict_citations,
                          sampling=deps.sampling)

    bundle = timed("synthesis", _synthesize)
    trace.outcome = REFUSED if bundle.refused else ANSWERED
    return bundle, trace
