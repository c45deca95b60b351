"""Acceptance gate: one test per release criterion, at its stated tolerance.

Each criterion also carries a wall-clock budget; the whole module runs
offline. The conftest hook prints one ACCEPTANCE PASS/FAIL line per test.
"""

import json
import random
import time

import pytest
from conftest import FIXTURES, FakeResponse, FakeSession, make_paper
from fastapi.testclient import TestClient
from golden_jats import GOLDEN_FRAGMENTS
from oracles import brute_force_stats, dom_text_nodes
from test_crossref import EXPECTED_RECORDS
from test_jats import assert_text_nodes_preserved, random_fragment

from scholarqa.config import Settings
from scholarqa.crossref import CrossrefClient, RetrievalCache, parse_works_response
from scholarqa.curation import CuratedQuery, Question, curate_fallback
from scholarqa.errors import NoAbstractsError, ProviderError
from scholarqa.evaluation import aggregate, cosine, run_eval
from scholarqa.jats import jats_to_plain_text
from scholarqa.pipeline import PipelineDeps, ask
from scholarqa.providers import MockProvider
from scholarqa.retry import RetryPolicy
from scholarqa.service import create_app
from scholarqa.synthesis import validate_citations

QUERY = CuratedQuery(("document", "similarity", "nlp"))


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.seconds, f"took {elapsed:.2f}s, budget {self.seconds}s"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


def test_curated_query_well_formedness():
    budget = Budget(5.0)
    content = ["sharding", "deadlock", "kubernetes", "profiling", "rust",
               "database", "latency", "cache", "webhook", "parser"]
    noise = ["how", "do", "i", "the", "a", "it", "using", "perform", "?!",
             "(why)", "s'il", "+", "REST", "O(n)", "C++"]
    rng = random.Random(2024)
    for _ in range(500):
        words = [rng.choice(content)]
        words += [rng.choice(content + noise) for _ in range(rng.randint(0, 12))]
        rng.shuffle(words)
        query = curate_fallback(Question(" ".join(words)))
        assert query.keywords, "query must carry at least one keyword"
        assert " " not in query.wire_form and "++" not in query.wire_form
        assert tuple(query.wire_form.split("+")) == query.keywords  # round-trip
        seen = set()
        for token in query.keywords:
            assert token and "+" not in token
            assert not any(c.isspace() for c in token)
            assert token == token.lower()
            assert token not in seen
            seen.add(token)
    budget.check()


def test_crossref_parsing_fixture_suite():
    budget = Budget(1.0)
    result = parse_works_response(load_fixture("crossref_works.json"), QUERY,
                                  fetched_at=0.0)
    assert list(result.papers) == EXPECTED_RECORDS  # hand-extracted expectation
    counts = [p.citation_count for p in result.papers]
    assert counts == sorted(counts, reverse=True)
    tied = [p.url for p in result.papers if p.citation_count == 7]
    assert tied == ["https://doi.org/10.1000/ccs.2021.006",
                    "https://doi.org/10.1000/dup.2021.007"]  # stable tie-break
    with pytest.raises(NoAbstractsError):
        parse_works_response(load_fixture("crossref_empty.json"), QUERY,
                             fetched_at=0.0)
    budget.check()


def test_jats_conversion_goldens_and_dom_oracle():
    budget = Budget(10.0)
    assert len(GOLDEN_FRAGMENTS) >= 20
    for fragment, expected in GOLDEN_FRAGMENTS:
        assert jats_to_plain_text(fragment) == expected  # byte-for-byte
    rng = random.Random(31337)
    for _ in range(1000):
        assert_text_nodes_preserved(random_fragment(rng))
    budget.check()


def test_citation_integrity_under_fuzzing():
    budget = Budget(5.0)
    rng = random.Random(777)
    papers = [make_paper(f"p{i}", 20 - i) for i in range(5)]
    known_urls = [p.url for p in papers]
    rogue_urls = [f"https://rogue.example/{i}" for i in range(8)]
    prose = ["Use inverted indexes. ", "Embeddings capture meaning. ",
             "Normalize before comparing. ", "Sampling reduces cost. "]
    for case in range(1000):
        parts = []
        sentinels = []
        for _ in range(rng.randint(1, 7)):
            roll = rng.random()
            if roll < 0.35:
                parts.append(rng.choice(prose))
            else:
                url = rng.choice(known_urls if roll < 0.65 else rogue_urls)
                quote = rng.choice(['"', "'"])
                inner = f"inner-{case}-{len(parts)}"
                if url in rogue_urls:
                    sentinels.append(inner)
                parts.append(f"<a href={quote}{url}{quote} "
                             f"target={quote}_blank{quote}>{inner}</a>")
        repaired, citations, violations = validate_citations("".join(parts), papers)
        for url in rogue_urls:
            assert f'href="{url}"' not in repaired
            assert f"href='{url}'" not in repaired
        for inner in sentinels:
            assert inner in repaired  # unwrap keeps the inner text
        assert all(url in known_urls for _, url in citations)
        assert all(url in rogue_urls for url in violations)
    budget.check()


def _pipeline_deps(tmp_path, payload, provider):
    session = FakeSession([FakeResponse(200, payload)])
    return PipelineDeps(
        crossref=CrossrefClient(session=session, sleep=lambda s: None,
                                retry=RetryPolicy(2, 0.01)),
        provider=provider,
        cache=RetrievalCache(tmp_path / "cache", 3600.0),
    )


def test_end_to_end_with_mocks(tmp_path):
    budget = Budget(1.0)
    cited = "https://doi.org/10.1000/emb.2020.002"
    provider = MockProvider(script=[
        "nlp+document+similarity",
        f'Embed and compare (<a href="{cited}" target="_blank">Neural Text '
        "Embeddings in Practice</a>).",
    ])
    deps = _pipeline_deps(tmp_path / "a", load_fixture("crossref_works.json"),
                          provider)
    bundle, trace = ask(Question("How do I perform document similarity"), deps)
    assert trace.outcome == "answered"
    assert len(bundle.citations) >= 1

    empty_provider = MockProvider(script=["nlp+document+similarity"])
    deps = _pipeline_deps(tmp_path / "b", load_fixture("crossref_empty.json"),
                          empty_provider)
    bundle, trace = ask(Question("How do I perform document similarity"), deps)
    assert bundle.answer_text == "insufficient research data"  # verbatim
    assert trace.outcome == "insufficient_data"
    assert len(empty_provider.chat_calls) == 1  # curation only, no synthesis call
    budget.check()


def test_statistics_oracle_equivalence():
    budget = Budget(5.0)
    rng = random.Random(4096)
    for _ in range(1000):
        scores = [rng.uniform(-1.0, 1.0) for _ in range(rng.randint(1, 60))]
        stats = aggregate(scores)
        oracle = brute_force_stats(scores)
        for name in ("maximum", "minimum", "average", "median", "std_dev"):
            assert abs(getattr(stats, name) - oracle[name]) < 1e-9
        assert stats.minimum <= stats.median <= stats.maximum
        assert stats.minimum <= stats.average <= stats.maximum
        assert stats.std_dev >= 0
    hand = aggregate([0.2, 0.4, 0.9])
    assert abs(hand.maximum - 0.9) < 1e-5
    assert abs(hand.minimum - 0.2) < 1e-5
    assert abs(hand.average - 0.5) < 1e-5
    assert abs(hand.median - 0.4) < 1e-5
    assert abs(hand.std_dev - 0.29439) < 1e-5
    budget.check()


def test_cosine_properties():
    budget = Budget(2.0)
    rng = random.Random(512)
    for _ in range(1000):
        n = rng.randint(2, 12)
        u = [rng.uniform(-1, 1) for _ in range(n)]
        v = [rng.uniform(-1, 1) for _ in range(n)]
        scale = rng.uniform(1e-3, 1e3)
        assert abs(cosine(u, u) - 1.0) < 1e-9 or all(x == 0 for x in u)
        assert abs(cosine(u, v) - cosine(v, u)) < 1e-9
        assert abs(cosine([scale * x for x in u], v) - cosine(u, v)) < 1e-9
    assert cosine((1.0, 2.0), (1.0, 2.0)) == pytest.approx(1.0, abs=1e-9)
    assert cosine((1.0, 0.0), (0.0, 5.0)) == pytest.approx(0.0, abs=1e-9)
    budget.check()


def test_eval_replay_determinism(tmp_path):
    budget = Budget(2.0)
    outputs = []
    for run in ("one", "two"):
        out = tmp_path / run
        run_eval(FIXTURES / "sample_eval.jsonl", embedder=MockProvider(),
                 replay=True, out_dir=out)
        outputs.append((out / "summary.json").read_bytes())
    assert outputs[0] == outputs[1]  # bit-identical
    budget.check()


def test_service_contract(tmp_path):
    budget = Budget(2.0)
    cited = "https://doi.org/10.1000/emb.2020.002"
    reply = (f'Embed and compare (<a href="{cited}" target="_blank">Neural '
             "Text Embeddings in Practice</a>).")

    provider = MockProvider(script=["nlp+docs", reply])
    deps = _pipeline_deps(tmp_path / "ok", load_fixture("crossref_works.json"),
                          provider)
    with TestClient(create_app(Settings(), deps)) as client:
        response = client.post("/ask", json={"question": "document similarity?"})
        assert response.status_code == 200
        assert response.json()["outcome"] == "answered"

        response = client.post("/ask", json={"question": ""})
        assert response.status_code == 400
        assert response.json()["request_id"]

    failing = MockProvider(script=[ProviderError("provider is down")])
    deps = _pipeline_deps(tmp_path / "down", load_fixture("crossref_works.json"),
                          failing)
    with TestClient(create_app(Settings(), deps)) as client:
        response = client.post("/ask", json={"question": "document similarity?"})
        assert response.status_code == 502
        assert response.json()["request_id"]
    budget.check()
