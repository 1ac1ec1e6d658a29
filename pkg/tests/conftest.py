from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from echoagent.fixtures.corpus import write_corpus
from echoagent.fixtures.studies import generate_ef_dataset, generate_qa_dataset
from echoagent.hub.toolkit import build_default_registry
from echoagent.kb.chunking import KnowledgePrimitive, SourceSpan, load_corpus
from echoagent.kb.index import KnowledgeBase
from echoagent.kb.summarize import build_all_entries


def make_primitive(pid, text, tags=(), embedding=None):
    return KnowledgePrimitive(
        id=pid,
        text=text,
        source=SourceSpan("test", 0, len(text)),
        anatomy_tags=frozenset(tags),
        embedding=embedding,
    )


def build_fixture_kb(corpus_dir, k: int = 8) -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.add_primitives(load_corpus(corpus_dir))
    build_all_entries(kb, k)
    return kb


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(root)
    return root


@pytest.fixture(scope="session")
def kb(corpus_dir):
    return build_fixture_kb(corpus_dir)


@pytest.fixture()
def registry():
    return build_default_registry()


@pytest.fixture(scope="session")
def ef_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("ef_dataset")
    generate_ef_dataset(root)
    return root


@pytest.fixture(scope="session")
def qa_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("qa_dataset")
    generate_qa_dataset(root)
    return root


class _StubHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        server: StubServer = self.server.stub  # type: ignore[attr-defined]
        server.requests.append((self.path, body))
        status, payload = server.next_response()
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class StubServer:
    """Scripted HTTP backend: responses pop off a script, last one repeats."""

    def __init__(self):
        self.requests: list[tuple[str, dict]] = []
        self.script: list[tuple[int, dict]] = [(200, {})]
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self._httpd.stub = self  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def next_response(self) -> tuple[int, dict]:
        if len(self.script) > 1:
            return self.script.pop(0)
        return self.script[0]

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def close(self):
        self._httpd.shutdown()
        self._httpd.server_close()


@pytest.fixture()
def stub_server():
    server = StubServer()
    yield server
    server.close()
