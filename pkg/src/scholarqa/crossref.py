"""CrossRef works client: fetch abstract-bearing papers and rank them.

Sends a free-text works query (keywords separated by literal `+`), keeps
only items whose abstract converts to non-empty plain text, and returns
records sorted by citation count descending with the API's relevance
order as the tie-break. A small JSON-file cache avoids refetching.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, urlencode

import requests

from .curation import CuratedQuery
from .errors import ApiError, MalformedXmlError, NoAbstractsError, StorageError, TransportError
from .jats import jats_to_plain_text
from .retry import RetryPolicy

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.crossref.org"
DEFAULT_ROWS = 15

_URI_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")


@dataclass(frozen=True)
class PaperRecord:
    """One retrieved paper: title, abstract, URL, citation count."""

    title: str
    abstract_jats: str
    abstract_plain: str
    url: str
    citation_count: int
    doi: str | None = None

    def __post_init__(self):
        if self.citation_count < 0:
            raise ValueError("citation_count must be non-negative")
        if not self.url or not _URI_SCHEME.match(self.url):
            raise ValueError(f"url must carry a URI scheme: {self.url!r}")
        if "<" in self.abstract_plain or ">" in self.abstract_plain:
            raise ValueError("abstract_plain must not contain angle brackets")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "abstract_jats": self.abstract_jats,
            "abstract_plain": self.abstract_plain,
            "url": self.url,
            "citation_count": self.citation_count,
            "doi": self.doi,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PaperRecord":
        return cls(
            title=raw["title"],
            abstract_jats=raw["abstract_jats"],
            abstract_plain=raw["abstract_plain"],
            url=raw["url"],
            citation_count=raw["citation_count"],
            doi=raw.get("doi"),
        )


@dataclass(frozen=True)
class RetrievalResult:
    """Papers for one query, sorted by citation count descending."""

    query: CuratedQuery
    papers: tuple[PaperRecord, ...]
    fetched_at: float

    def __post_init__(self):
        counts = [p.citation_count for p in self.papers]
        if any(counts[i] < counts[i + 1] for i in range(len(counts) - 1)):
            raise ValueError("papers must be sorted by citation count descending")

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "keywords": list(self.query.keywords),
            "fetched_at": self.fetched_at,
            "papers": [p.to_dict() for p in self.papers],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RetrievalResult":
        return cls(
            query=CuratedQuery(tuple(raw["keywords"])),
            papers=tuple(PaperRecord.from_dict(p) for p in raw["papers"]),
            fetched_at=float(raw["fetched_at"]),
        )


def parse_works_response(payload: dict, query: CuratedQuery,
                         rows: int = DEFAULT_ROWS, *,
                         fetched_at: float | None = None) -> RetrievalResult:
    """Extract, convert, and rank paper records from a works response.

    Items without an abstract, or whose abstract converts to an empty
    string or fails to parse, are discarded. A missing citation count
    becomes 0 (the paper stays, ranked last). Raises NoAbstractsError when
    nothing usable remains.
    """
    message = payload.get("message") or {}
    items = message.get("items") or []
    records: list[PaperRecord] = []
    for item in items[:rows]:
        abstract = item.get("abstract")
        if not abstract:
            continue
        try:
            plain = jats_to_plain_text(abstract)
        except MalformedXmlError:
            logger.warning("discarding item with unparseable abstract: %s",
                           item.get("DOI", "<no doi>"))
            continue
        if not plain:
            continue
        doi = item.get("DOI")
        url = item.get("URL") or (f"https://doi.org/{doi}" if doi else None)
        if not url:
            continue
        titles = item.get("title") or []
        title = re.sub(r"\s+", " ", titles[0]).strip() if titles else ""
        raw_count = item.get("is-referenced-by-count", 0)
        try:
            count = max(int(raw_count), 0)
        except (TypeError, ValueError):
            count = 0
        records.append(PaperRecord(title=title, abstract_jats=abstract,
                                   abstract_plain=plain, url=url,
                                   citation_count=count, doi=doi))
    if not records:
        raise NoAbstractsError(f"no usable abstracts for query {query.wire_form!r}")
    records.sort(key=lambda r: r.citation_count, reverse=True)  # stable: ties keep relevance order
    return RetrievalResult(query=query, papers=tuple(records),
                           fetched_at=time.time() if fetched_at is None else fetched_at)


class CrossrefClient:
    """Shareable works-API client with bounded retries.

    Transient failures (connection errors, 5xx) are retried with
    exponential backoff; 4xx responses raise ApiError immediately.
    """

    def __init__(self, base_url: str = DEFAULT_BASE_URL, mailto: str = "", *,
                 retry: RetryPolicy = RetryPolicy(),
                 session: requests.Session | None = None,
                 timeout: float = 30.0, sleep=time.sleep, clock=time.time):
        self.base_url = base_url.rstrip("/")
        self.mailto = mailto
        self.retry = retry
        self.timeout = timeout
        self._session = session or requests.Session()
        self._sleep = sleep
        self._clock = clock

    def works_url(self, query: CuratedQuery, rows: int) -> str:
        params = [
            ("query", query.wire_form),
            ("rows", str(rows)),
            ("filter", "has-abstract:true"),
            ("sort", "relevance"),
        ]
        if self.mailto:
            params.append(("mailto", self.mailto))
        # `+` stays literal so the wire form reaches the API unchanged
        return f"{self.base_url}/works?" + urlencode(params, safe="+", quote_via=quote)

    def _headers(self) -> dict:
        agent = "scholarqa/0.1"
        if self.mailto:
            agent += f" (mailto:{self.mailto})"
        return {"User-Agent": agent, "Accept": "application/json"}

    def fetch_papers(self, query: CuratedQuery, rows: int = DEFAULT_ROWS) -> RetrievalResult:
        if rows <= 0:
            raise ValueError("rows must be positive")
        url = self.works_url(query, rows)
        last_error: Exception | None = None
        for attempt in range(1, self.retry.max_attempts + 1):
            try:
                response = self._session.get(url, headers=self._headers(),
                                             timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
            else:
                if response.status_code == 200:
                    try:
                        payload = response.json()
                    except ValueError as exc:
                        raise ApiError(200, response.text[:2000]) from exc
                    return parse_works_response(payload, query, rows,
                                                fetched_at=self._clock())
                if 400 <= response.status_code < 500:
                    raise ApiError(response.status_code, response.text[:2000])
                last_error = ApiError(response.status_code, response.text[:2000])
            if attempt < self.retry.max_attempts:
                self._sleep(self.retry.delay(attempt))
        raise TransportError(
            f"works request failed after {self.retry.max_attempts} attempts: {last_error}"
        )


class RetrievalCache:
    """One JSON document per query under a directory; key = wire_form.

    Writes are atomic (tempfile + rename), so concurrent writers for the
    same key resolve to last-writer-wins and readers never see a partial
    document. Corrupt entries are logged and treated as misses.
    """

    def __init__(self, directory: str | Path, ttl_seconds: float = 86400.0, *,
                 clock=time.time):
        self.directory = Path(directory)
        self.ttl_seconds = ttl_seconds
        self._clock = clock

    def _path(self, wire_form: str) -> Path:
        digest = hashlib.sha256(wire_form.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def store(self, result: RetrievalResult) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(result.query.wire_form)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(result.to_dict(), handle)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _read(self, path: Path) -> RetrievalResult:
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            return RetrievalResult.from_dict(raw)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise StorageError(f"corrupt cache entry {path.name}: {exc}") from exc

    def lookup(self, query: CuratedQuery) -> RetrievalResult | None:
        path = self._path(query.wire_form)
        if not path.exists():
            return None
        try:
            result = self._read(path)
        except StorageError as exc:
            logger.warning("%s", exc)
            return None
        if result.query.wire_form != query.wire_form:
            return None
        if self._clock() - result.fetched_at > self.ttl_seconds:
            return None
        return result
