"""URL content retrieval: find links, fetch pages, strip HTML, summarize.

The retriever turns the links embedded in an explanation into an annotated
text block that a judge prompt can consume.  Every step is meant to be
reproducible offline: fetches are cached on disk keyed by URL, stripping and
summarization are deterministic, and a dead or unreachable link degrades to a
"not working" annotation instead of an exception.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import tempfile
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Sequence
from urllib.parse import urlparse

import requests

NO_LINKS_BLOCK = "No links found in the explanation."
DEFAULT_SUMMARY_BUDGET = 512

_URL_RE = re.compile(r"https?://[^\s<>\"']+")
_TRAILING_PUNCT = ".,)"


def extract_urls(text: str) -> list[str]:
    """Return every http(s) URL in ``text``, in order, deduplicated.

    Trailing ".", "," and ")" are trimmed, except a ")" that closes a "("
    inside the URL itself (Wikipedia-style disambiguation links).
    """
    seen: set[str] = set()
    urls: list[str] = []
    for match in _URL_RE.finditer(text):
        url = match.group(0)
        while url and url[-1] in _TRAILING_PUNCT:
            if url[-1] == ")" and url.count("(") >= url.count(")"):
                break
            url = url[:-1]
        if url and url not in seen:
            seen.add(url)
            urls.append(url)
    return urls


@dataclass
class FetchPolicy:
    """Knobs for outbound HTTP; defaults are polite and test-friendly."""

    timeout_s: float = 10.0
    max_redirects: int = 5
    user_agent: str = "fingract-ucr/0.1 (explanation link checker)"
    cache_dir: Path | None = None
    offline: bool = False          # never touch the network; cache misses become "not working"
    min_host_interval_s: float = 1.0
    fan_out: int = 4


@dataclass(frozen=True)
class FetchResult:
    """Outcome of one GET.  ``working`` implies a non-empty textual body."""

    url: str
    working: bool
    fetched_at: float
    status_code: int | None = None
    body: str | None = None
    reason: str | None = None    # dns | timeout | http_status | non-html | offline


_host_gates: dict[str, threading.Lock] = {}
_host_last: dict[str, float] = {}
_gates_lock = threading.Lock()


def _respect_host_rate(url: str, policy: FetchPolicy) -> threading.Lock:
    host = urlparse(url).netloc
    with _gates_lock:
        gate = _host_gates.setdefault(host, threading.Lock())
    return gate


def _throttle(url: str, policy: FetchPolicy) -> None:
    if policy.min_host_interval_s <= 0:
        return
    host = urlparse(url).netloc
    now = time.monotonic()
    last = _host_last.get(host)
    if last is not None:
        wait = policy.min_host_interval_s - (now - last)
        if wait > 0:
            time.sleep(wait)
    _host_last[host] = time.monotonic()


def _cache_path(cache_dir: Path, url: str) -> Path:
    digest = hashlib.sha256(url.encode("utf-8")).hexdigest()
    return Path(cache_dir) / f"{digest}.json"


def cache_store(cache_dir: Path, result: FetchResult, headers: dict | None = None) -> Path:
    """Persist a fetch result; write-temp-then-rename so readers never see partial files."""
    path = _cache_path(cache_dir, result.url)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "url": result.url,
        "working": result.working,
        "status_code": result.status_code,
        "reason": result.reason,
        "headers": headers or {},
        "body": result.body,
        "fetched_at": result.fetched_at,
    }
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
    os.replace(tmp, path)
    return path


def cache_load(cache_dir: Path, url: str) -> FetchResult | None:
    path = _cache_path(cache_dir, url)
    if not path.exists():
        return None
    payload = json.loads(path.read_text(encoding="utf-8"))
    return FetchResult(
        url=payload["url"],
        working=payload["working"],
        fetched_at=payload["fetched_at"],
        status_code=payload.get("status_code"),
        body=payload.get("body"),
        reason=payload.get("reason"),
    )


def _classify_response(url: str, resp: requests.Response) -> FetchResult:
    now = time.time()
    if not (200 <= resp.status_code < 300):
        return FetchResult(url, False, now, status_code=resp.status_code, reason="http_status")
    content_type = resp.headers.get("Content-Type", "").lower()
    textual = (
        content_type == ""
        or "html" in content_type
        or "xml" in content_type
        or content_type.startswith("text/")
    )
    if not textual:
        return FetchResult(url, False, now, status_code=resp.status_code, reason="non-html")
    body = resp.text
    if not body or not body.strip():
        return FetchResult(url, False, now, status_code=resp.status_code, reason="non-html")
    return FetchResult(url, True, now, status_code=resp.status_code, body=body)


def fetch(url: str, policy: FetchPolicy | None = None) -> FetchResult:
    """GET ``url`` and classify it working / not working.  Never raises.

    Results are cached on disk when the policy carries a cache directory;
    a warm cache entry short-circuits the network entirely.
    """
    policy = policy or FetchPolicy()
    if policy.cache_dir is not None:
        cached = cache_load(policy.cache_dir, url)
        if cached is not None:
            return cached
    if policy.offline:
        return FetchResult(url, False, time.time(), reason="offline")

    gate = _respect_host_rate(url, policy)
    with gate:
        _throttle(url, policy)
        session = requests.Session()
        session.max_redirects = policy.max_redirects
        try:
            resp = session.get(
                url,
                timeout=policy.timeout_s,
                headers={"User-Agent": policy.user_agent},
                allow_redirects=True,
            )
            result = _classify_response(url, resp)
        except requests.exceptions.Timeout:
            result = FetchResult(url, False, time.time(), reason="timeout")
        except requests.exceptions.TooManyRedirects:
            result = FetchResult(url, False, time.time(), reason="http_status")
        except requests.exceptions.RequestException:
            # DNS failure, refused connection, unroutable host, ...
            result = FetchResult(url, False, time.time(), reason="dns")
        finally:
            session.close()

    if policy.cache_dir is not None:
        cache_store(policy.cache_dir, result)
    return result


def fetch_all(urls: Sequence[str], policy: FetchPolicy | None = None) -> list[FetchResult]:
    """Fetch many URLs concurrently (bounded fan-out, per-host serialized)."""
    policy = policy or FetchPolicy()
    if not urls:
        return []
    workers = max(1, min(policy.fan_out, len(urls)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda u: fetch(u, policy), urls))


# --- HTML stripping ---------------------------------------------------------

_SKIP_CONTENT = {"script", "style"}
_BLOCK_TAGS = {
    "p", "div", "br", "li", "ul", "ol", "dl", "dt", "dd", "tr", "td", "th",
    "table", "h1", "h2", "h3", "h4", "h5", "h6", "section", "article",
    "header", "footer", "blockquote", "pre", "hr", "title", "nav", "aside",
    "form", "figure", "figcaption", "main",
}


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_CONTENT:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_startendtag(self, tag, attrs):
        if tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_CONTENT:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)

    # comments, declarations, processing instructions: dropped silently


def _strip_once(html: str) -> str:
    parser = _TextExtractor()
    try:
        parser.feed(html)
        parser.close()
    except Exception:
        # html.parser is lenient, but guard against pathological input anyway
        pass
    text = "".join(parser.parts)
    text = re.sub(r"[ \t\r\f\v]+", " ", text)
    lines = [line.strip() for line in text.split("\n")]
    return "\n".join(line for line in lines if line)


def strip_html(html: str) -> str:
    """Remove tags, script/style payloads and comments; decode entities.

    Iterates to a fixed point so entity-encoded markup cannot survive one
    pass and reappear; the result is idempotent by construction.
    """
    text = html
    for _ in range(200):
        nxt = _strip_once(text)
        if nxt == text:
            return text
        text = nxt
    return text


# --- extractive summarization ------------------------------------------------

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+|\n+")
_WORD_RE = re.compile(r"\w+")


def whitespace_tokens(text: str) -> list[str]:
    return text.split()


def split_sentences(text: str) -> list[str]:
    parts = _SENTENCE_SPLIT.split(text)
    return [p.strip() for p in parts if p and p.strip()]


def centroid_scores(sentences: Sequence[str]) -> list[float]:
    """Cosine similarity of each sentence's term counts to the document's.

    Deterministic, model-free ranking; sentences with no word tokens score 0.
    """
    centroid: Counter[str] = Counter()
    per_sentence: list[Counter[str]] = []
    for sentence in sentences:
        counts = Counter(_WORD_RE.findall(sentence.lower()))
        per_sentence.append(counts)
        centroid.update(counts)
    centroid_norm = math.sqrt(sum(v * v for v in centroid.values()))
    scores: list[float] = []
    for counts in per_sentence:
        if not counts or centroid_norm == 0:
            scores.append(0.0)
            continue
        dot = sum(c * centroid[w] for w, c in counts.items())
        norm = math.sqrt(sum(c * c for c in counts.values()))
        scores.append(dot / (norm * centroid_norm))
    return scores


def summarize(
    text: str,
    budget: int,
    scorer: Callable[[Sequence[str]], list[float]] | None = None,
    tokenizer: Callable[[str], list[str]] | None = None,
) -> str:
    """Extractive summary: top-ranked sentences, emitted in document order.

    Sentences are ranked by ``scorer`` (default: frequency-centroid cosine),
    greedily selected while they fit the token ``budget``, and joined in their
    original order, so every output sentence is a verbatim substring of the
    input.  Text already within budget is returned unchanged.
    """
    if budget <= 0:
        raise ValueError(f"summary budget must be positive, got {budget}")
    if not text.strip():
        return ""
    tokenizer = tokenizer or whitespace_tokens
    if len(tokenizer(text)) <= budget:
        return text
    scorer = scorer or centroid_scores
    sentences = split_sentences(text)
    scores = scorer(sentences)
    ranked = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    chosen: list[int] = []
    remaining = budget
    for idx in ranked:
        cost = len(tokenizer(sentences[idx]))
        if 0 < cost <= remaining:
            chosen.append(idx)
            remaining -= cost
    return " ".join(sentences[i] for i in sorted(chosen))


def build_links_content(
    urls: Sequence[str],
    policy: FetchPolicy | None = None,
    budget: int = DEFAULT_SUMMARY_BUDGET,
    scorer: Callable[[Sequence[str]], list[float]] | None = None,
) -> str:
    """Assemble the annotated links block fed to the source-evaluation prompt.

    One section per URL stating whether it is working and a summary of its
    stripped text ("(none)" when nothing textual could be extracted).  An
    explanation without links yields the literal no-links sentence.
    """
    if not urls:
        return NO_LINKS_BLOCK
    results = fetch_all(urls, policy)
    sections = []
    for url, result in zip(urls, results):
        if result.working:
            text = strip_html(result.body or "")
            summary = summarize(text, budget, scorer=scorer) if text else ""
            status = "working"
            content = summary if summary else "(none)"
        else:
            status = "not working"
            content = "(none)"
        sections.append(f"URL: {url}\nStatus: {status}\nContent: {content}")
    return "\n\n".join(sections)
