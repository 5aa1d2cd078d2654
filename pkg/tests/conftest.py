"""Shared fixtures: a local HTTP server standing in for both web pages and
a chat-completions endpoint, plus the scripted worked-example backend."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

PAGE_HTML = """<html>
<head>
  <title>River deltas</title>
  <style>p { color: red; }</style>
</head>
<body>
  <!-- navigation chrome -->
  <script>var tracker = "noise";</script>
  <h1>Delta geography</h1>
  <p>The river delta floods every spring.</p>
  <p>Birds migrate across the delta in huge flocks.</p>
  <p>The delta soil is rich because the river deposits silt.</p>
  <p>Local farmers plant rice &amp; beans after the flood recedes.</p>
</body>
</html>"""

IMAGES_ONLY_HTML = """<html><body>
<script>render();</script>
<img src="a.png"/><img src="b.png"/>
<style>img { border: 0; }</style>
</body></html>"""


def _fixture_page(index: int) -> str:
    paragraphs = "\n".join(
        f"<p>Paragraph {index}-{k} talks about topic {index % 7} &amp; detail {k}.</p>" for k in range(4)
    )
    return (
        f"<html><head><title>Fixture {index}</title><style>h1{{font-size:2em}}</style></head>"
        f"<body><script>var p={index};</script><h1>Fixture page {index}</h1>{paragraphs}"
        f"<!-- comment {index} --><div>entities: &lt;kept&gt; &amp; decoded</div></body></html>"
    )


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):   # keep test output quiet
        pass

    def _send(self, status: int, body: bytes, content_type: str = "text/html; charset=utf-8", headers=None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for key, value in (headers or {}).items():
            self.send_header(key, value)
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self.server.request_log.append(("GET", self.path))
        if self.path == "/page.html":
            self._send(200, PAGE_HTML.encode())
        elif self.path == "/images_only.html":
            self._send(200, IMAGES_ONLY_HTML.encode())
        elif self.path.startswith("/pages/") and self.path.endswith(".html"):
            index = int(self.path[len("/pages/"):-len(".html")])
            self._send(200, _fixture_page(index).encode())
        elif self.path == "/image.png":
            self._send(200, b"\x89PNG\r\n\x1a\nfake", content_type="image/png")
        elif self.path == "/empty":
            self._send(200, b"")
        elif self.path == "/slow":
            time.sleep(2.0)
            self._send(200, b"<p>finally</p>")
        elif self.path == "/redirect-loop":
            self._send(302, b"", headers={"Location": "/redirect-loop"})
        else:
            self._send(404, b"<p>not found</p>")

    def do_POST(self):
        self.server.request_log.append(("POST", self.path))
        length = int(self.headers.get("Content-Length", "0"))
        payload = json.loads(self.rfile.read(length) or b"{}")
        prompt = payload.get("messages", [{}])[0].get("content", "")
        n = payload.get("n", 1)
        if self.path == "/chat-down":
            self._send(503, b"{}", content_type="application/json")
            return
        if self.path.startswith("/chat-flaky/"):
            token = self.path.rsplit("/", 1)[1]
            if not self.server.state.get(token):
                self.server.state[token] = True
                self._send(429, b"{}", content_type="application/json")
                return
        if "divide the claim" in prompt:
            contents = [EARTH_SEGMENTATION_OUTPUT] * n
        elif "Links content:" in prompt:
            contents = [EARTH_JUDGE_UCR_OUTPUT] * n
        elif "List of errors:" in prompt:
            contents = [EARTH_JUDGE_PLAIN_OUTPUT] * n
        else:
            digest = hashlib.sha256(prompt.encode()).hexdigest()[:8]
            contents = [f"echo {i} {digest}" for i in range(n)]
        choices = [{"message": {"content": c}} for c in contents]
        body = json.dumps({"choices": choices}).encode()
        self._send(200, body, content_type="application/json")


class _FixtureServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.request_log: list[tuple[str, str]] = []
        self.state: dict = {}


@pytest.fixture(scope="session")
def fixture_server():
    server = _FixtureServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    server.base_url = f"http://127.0.0.1:{server.server_address[1]}"
    server.url = lambda path: f"{server.base_url}{path}"
    yield server
    server.shutdown()


# --- worked example shared by several test modules ---------------------------

EARTH_CLAIM = "Earth is flat and red."
EARTH_EVIDENCE = "Nasa images shows that Eart is a blue marble shaped planet."
EARTH_EXPLANATION = (
    "The claim has two errors in earth's description. The errors are in the words 'flat' and 'red'. "
    'The correct version of the claim is : "Earth is round and blue". '
    "Check NASA images at: Check NASA images at https://explorer1.jpl.nasa.gov/galleries/earth-from-space"
)
EARTH_URL = "https://explorer1.jpl.nasa.gov/galleries/earth-from-space"

EARTH_REASON_1 = "The evidence explicitly states that Earth is a marble shaped planet, not flat."
EARTH_REASON_2 = "As per the evidence, Earth is blue."

EARTH_SEGMENTATION_OUTPUT = f"""[
{{'sentence': 'Earth is flat', 'reason': '{EARTH_REASON_1}', 'correction': 'Earth is round.'}}, {{'sentence': 'Earth is red', 'reason': '{EARTH_REASON_2}', 'correction': 'Earth is blue'}}
]"""

EARTH_JUDGE_PLAIN_OUTPUT = f"""[
{{'error': '{EARTH_REASON_1}', 'response': 'Yes', 'correction': 'Yes', 'supporting_links': 'Yes'}}, {{'error': '{EARTH_REASON_2}', 'response': 'Yes', 'correction': 'Yes', 'supporting_links': 'Yes'}}
]"""

EARTH_JUDGE_UCR_OUTPUT = f"""[
{{'error': '{EARTH_REASON_1}', 'response': 'Yes', 'correction': 'Yes', 'existing_links': 'Yes', 'related_links': 'Yes', 'supporting_links': 'Yes'}}, {{'error': '{EARTH_REASON_2}', 'response': 'Yes', 'correction': 'Yes', 'existing_links': 'Yes', 'related_links': 'Yes', 'supporting_links': 'Yes'}}
]"""

EARTH_SCRIPT = [
    {"match": "divide the claim", "responses": [EARTH_SEGMENTATION_OUTPUT]},
    {"match": "Links content:", "responses": [EARTH_JUDGE_UCR_OUTPUT]},
    {"match": "List of errors:", "responses": [EARTH_JUDGE_PLAIN_OUTPUT]},
]


@pytest.fixture
def earth_backend():
    from fingract.gateway import MockReplayBackend

    return MockReplayBackend(EARTH_SCRIPT)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion at the end of a run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and getattr(report, "when", "call") == "call":
                rows.append((nodeid.split("::")[-1], outcome))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in sorted(rows):
            terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL':<4}  {name}")
