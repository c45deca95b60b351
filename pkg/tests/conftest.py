import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from scholarqa.crossref import PaperRecord

FIXTURES = Path(__file__).parent / "fixtures"


def make_paper(slug="p1", citation_count=3, abstract="Plain abstract text.",
               title=None):
    return PaperRecord(
        title=title or f"Paper {slug}",
        abstract_jats=f"<jats:p>{abstract}</jats:p>",
        abstract_plain=abstract,
        url=f"https://doi.org/10.1000/{slug}",
        citation_count=citation_count,
        doi=f"10.1000/{slug}",
    )


@pytest.fixture
def works_payload():
    return json.loads((FIXTURES / "crossref_works.json").read_text())


@pytest.fixture
def empty_payload():
    return json.loads((FIXTURES / "crossref_empty.json").read_text())


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text if payload is None else json.dumps(payload)

    def json(self):
        if self._payload is None:
            raise ValueError("no JSON body")
        return self._payload


class FakeSession:
    """requests.Session stand-in: replays a scripted list of responses.

    Script entries are FakeResponse objects or exceptions to raise.
    """

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def _next(self, url):
        self.calls.append(url)
        if not self.script:
            raise AssertionError("FakeSession script exhausted")
        step = self.script.pop(0)
        if isinstance(step, Exception):
            raise step
        return step

    def get(self, url, **kwargs):
        return self._next(url)

    def post(self, url, **kwargs):
        return self._next(url)


class _StubHandler(BaseHTTPRequestHandler):
    payload_bytes = b"{}"
    status = 200
    requests_seen = None

    def do_GET(self):
        type(self).requests_seen.append(self.path)
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(self.payload_bytes)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_http_server():
    """Local HTTP server that answers every GET with a configured JSON body.

    Yields a factory: call with a payload dict (and optional status) to get
    the base URL; the handler records request paths on the returned list.
    """
    servers = []

    def start(payload, status=200):
        handler = type("Handler", (_StubHandler,), {
            "payload_bytes": json.dumps(payload).encode(),
            "status": status,
            "requests_seen": [],
        })
        server = HTTPServer(("127.0.0.1", 0), handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_port}", handler.requests_seen

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    print(f"\nACCEPTANCE {'PASS' if report.passed else 'FAIL'}: {name}")
