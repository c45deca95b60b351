"""Answer software-engineering questions from scholarly paper abstracts.

The pipeline curates a keyword query from the question, retrieves
abstract-bearing papers from the CrossRef works API ranked by citation
count, and synthesizes a cited answer through a pluggable model provider.
An evaluation harness scores generated answers against reference answers
with embedding cosine similarity.
"""

__version__ = "0.1.0"

from .crossref import CrossrefClient, PaperRecord, RetrievalCache, RetrievalResult
from .curation import CuratedQuery, Question, curate_fallback, curate_with_llm
from .evaluation import SimilarityStats, aggregate, cosine, run_eval, sts_score
from .jats import jats_to_plain_text
from .pipeline import PipelineDeps, PipelineTrace, ask, build_deps
from .providers import ChatRequest, EmbeddingVector, HttpProvider, LlmProvider, MockProvider
from .synthesis import AnswerBundle, build_qa_prompt, synthesize, validate_citations

__all__ = [
    "AnswerBundle",
    "ChatRequest",
    "CrossrefClient",
    "CuratedQuery",
    "EmbeddingVector",
    "HttpProvider",
    "LlmProvider",
    "MockProvider",
    "PaperRecord",
    "PipelineDeps",
    "PipelineTrace",
    "Question",
    "RetrievalCache",
    "RetrievalResult",
    "SimilarityStats",
    "aggregate",
    "ask",
    "build_deps",
    "build_qa_prompt",
    "cosine",
    "curate_fallback",
    "curate_with_llm",
    "jats_to_plain_text",
    "run_eval",
    "sts_score",
    "synthesize",
    "validate_citations",
    "__version__",
]
