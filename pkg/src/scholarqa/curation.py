"""Turn a natural-language question into a `+`-separated keyword query.

Two routes: the model-backed `curate_with_llm`, and the deterministic
`curate_fallback` (lowercase, strip punctuation, drop stopwords) used when
no provider is available or the model reply is unusable.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass

from .errors import EmptyReplyError, MalformedQueryError
from .prompts import CURATION_PROMPT
from .providers import ChatRequest, LlmProvider, SamplingParams
from .stopwords import is_stopword

_PUNCT_TO_SPACE = str.maketrans({c: " " for c in string.punctuation})
_WHITESPACE_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class Question:
    """A user's natural-language question plus optional source metadata."""

    text: str
    source_id: str | None = None
    asked_at: float | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("question text must be non-empty")


@dataclass(frozen=True)
class CuratedQuery:
    """Ordered keyword list and its `+`-joined wire form."""

    keywords: tuple[str, ...]

    def __post_init__(self):
        if not self.keywords:
            raise ValueError("keyword list must be non-empty")
        seen = set()
        for token in self.keywords:
            if not token:
                raise ValueError("empty keyword")
            if "+" in token or _WHITESPACE_RUN.search(token):
                raise ValueError(f"keyword contains '+' or whitespace: {token!r}")
            if token != token.lower():
                raise ValueError(f"keyword is not lowercase: {token!r}")
            if token in seen:
                raise ValueError(f"duplicate keyword: {token!r}")
            seen.add(token)

    @property
    def wire_form(self) -> str:
        return "+".join(self.keywords)


def _dedupe(tokens: list[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for token in tokens:
        if token and token not in seen:
            seen.add(token)
            out.append(token)
    return tuple(out)


def normalize_reply(reply: str) -> tuple[str, ...]:
    """Normalize a raw model reply into keyword tokens.

    Trim, lowercase, collapse whitespace runs to `+`, then drop empty and
    duplicate tokens (first occurrence wins).
    """
    collapsed = _WHITESPACE_RUN.sub("+", reply.strip().lower())
    return _dedupe(collapsed.split("+"))


def curate_with_llm(q: Question, provider: LlmProvider,
                    sampling: SamplingParams | None = None) -> CuratedQuery:
    """Ask the provider to curate a search query for the question.

    Raises MalformedQueryError when the reply normalizes to nothing, so the
    caller can fall back to `curate_fallback`. Provider transport/auth
    failures propagate as ProviderError.
    """
    request = ChatRequest(instruction=CURATION_PROMPT, user_content=q.text,
                          sampling=sampling or SamplingParams())
    try:
        reply = provider.complete(request)
    except EmptyReplyError as exc:
        raise MalformedQueryError("provider reply was empty") from exc
    keywords = normalize_reply(reply)
    if not keywords:
        raise MalformedQueryError(f"provider reply yielded no keywords: {reply!r}")
    return CuratedQuery(keywords)


def curate_fallback(q: Question) -> CuratedQuery:
    """Deterministic offline curation: tokenize, drop stopwords, dedupe."""
    text = q.text.lower().translate(_PUNCT_TO_SPACE)
    keywords = _dedupe([t for t in text.split() if not is_stopword(t)])
    if not keywords:
        raise MalformedQueryError("no keywords survive stopword removal")
    return CuratedQuery(keywords)
