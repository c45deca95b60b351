"""Build the QA prompt from retrieved abstracts, get the answer, guard citations.

The model is asked to cite sources inline as
`(<a href="url" target="_blank">title</a>)`. Replies are scanned after the
fact: anchors pointing at a supplied paper are kept and recorded, anything
else is unwrapped to its inner text so the answer never links outside the
retrieved set.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .crossref import PaperRecord
from .curation import Question
from .errors import CitationIntegrityError, EmptyContextError
from .prompts import QA_PROMPT, REFUSAL_PHRASE
from .providers import ChatRequest, LlmProvider, SamplingParams

logger = logging.getLogger(__name__)

DEFAULT_CONTEXT_BUDGET = 24_000  # characters of user content

_ANCHOR = re.compile(
    r"""<a\b[^>]*?href\s*=\s*(["'])(.*?)\1[^>]*>(.*?)</a>""",
    re.IGNORECASE | re.DOTALL,
)


@dataclass(frozen=True)
class AnswerBundle:
    """Synthesized answer plus the papers it was allowed to cite."""

    answer_text: str
    citations: tuple[tuple[str, str], ...]  # (title, url) pairs actually cited
    used_papers: tuple[PaperRecord, ...]
    refused: bool

    def __post_init__(self):
        allowed = {p.url for p in self.used_papers}
        for match in _ANCHOR.finditer(self.answer_text):
            if match.group(2).strip() not in allowed:
                raise ValueError(f"anchor cites unknown URL: {match.group(2)!r}")
        if self.refused and self.citations:
            raise ValueError("a refusal carries no citations")
        pairs = {(re.sub(r"\s+", " ", p.title).strip(), p.url) for p in self.used_papers}
        for title, url in self.citations:
            if (re.sub(r"\s+", " ", title).strip(), url) not in pairs:
                raise ValueError(f"citation not among used papers: {(title, url)!r}")


def _context_entry(index: int, paper: PaperRecord) -> str:
    return (
        f"[{index}] {paper.title} — {paper.url} "
        f"(citations: {paper.citation_count})\nAbstract: {paper.abstract_plain}"
    )


def select_papers_within_budget(q: Question, papers: list[PaperRecord] | tuple[PaperRecord, ...],
                                budget: int = DEFAULT_CONTEXT_BUDGET) -> list[PaperRecord]:
    """Keep the longest prefix of (already ranked) papers that fits the budget.

    Papers are dropped whole, lowest-ranked first; abstracts are never
    split. Raises EmptyContextError when not even the first paper fits.
    """
    if not papers:
        raise ValueError("papers must be non-empty")
    used: list[PaperRecord] = []
    total = len(q.text)
    for k, paper in enumerate(papers, start=1):
        entry_len = len(_context_entry(k, paper)) + 2  # separating blank line
        if total + entry_len > budget:
            break
        total += entry_len
        used.append(paper)
    if not used:
        raise EmptyContextError(f"no paper fits a budget of {budget} characters")
    return used


def _render_user_content(q: Question, used: list[PaperRecord]) -> str:
    entries = [_context_entry(k, p) for k, p in enumerate(used, start=1)]
    return "\n\n".join([q.text] + entries)


def build_qa_prompt(q: Question, papers: list[PaperRecord] | tuple[PaperRecord, ...],
                    budget: int = DEFAULT_CONTEXT_BUDGET) -> ChatRequest:
    """Assemble the chat request: QA instruction plus question and contexts."""
    used = select_papers_within_budget(q, papers, budget)
    return ChatRequest(instruction=QA_PROMPT, user_content=_render_user_content(q, used))


def validate_citations(answer_text: str, used_papers) -> tuple[str, list[tuple[str, str]], list[str]]:
    """Keep anchors that cite a used paper; unwrap the rest.

    Returns (repaired_text, citations, violations) where citations are
    (title, url) pairs taken from the matching papers and violations are
    the URLs of removed anchors. Total: never raises.
    """
    by_url = {p.url: p for p in used_papers}
    citations: list[tuple[str, str]] = []
    violations: list[str] = []

    def _repair(match: re.Match) -> str:
        url = match.group(2).strip()
        paper = by_url.get(url)
        if paper is None:
            violations.append(url)
            return match.group(3)
        pair = (paper.title, paper.url)
        if pair not in citations:
            citations.append(pair)
        return match.group(0)

    repaired = _ANCHOR.sub(_repair, answer_text)
    return repaired, citations, violations


def synthesize(q: Question, retrieval, provider: LlmProvider, *,
               context_budget: int = DEFAULT_CONTEXT_BUDGET,
               strict: bool = False,
               sampling: SamplingParams | None = None) -> AnswerBundle:
    """Answer the question from the retrieval's papers.

    Detects the out-of-domain refusal baked into the QA instruction and
    repairs (or, in strict mode, rejects) citations of unknown URLs.
    """
    used = select_papers_within_budget(q, retrieval.papers, context_budget)
    request = ChatRequest(instruction=QA_PROMPT,
                          user_content=_render_user_content(q, used),
                          sampling=sampling or SamplingParams())
    reply = provider.complete(request)
    repaired, citations, violations = validate_citations(reply, used)
    if violations:
        if strict:
            raise CitationIntegrityError(f"answer cited unknown URLs: {violations}")
        logger.warning("unwrapped %d anchor(s) citing unknown URLs: %s",
                       len(violations), violations)
    refused = REFUSAL_PHRASE in repaired.lower()
    return AnswerBundle(
        answer_text=repaired,
        citations=() if refused else tuple(citations),
        used_papers=tuple(used),
        refused=refused,
    )
