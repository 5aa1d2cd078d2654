"""Chat-completion gateway: templates, backends, caching, output parsing.

Two backends speak the same tiny interface: a remote OpenAI-style HTTP
endpoint and a scripted mock that replays canned completions.  Every call
that goes through :func:`complete` can be persisted to a content-addressed
on-disk cache, which makes whole pipeline runs replayable bit-for-bit.
"""

from __future__ import annotations

import ast
import hashlib
import json
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .errors import FingractError


class UnboundPlaceholder(FingractError):
    def __init__(self, name: str):
        super().__init__(f"no binding for placeholder {{{name}}}")
        self.name = name


class BackendUnavailable(FingractError):
    pass


class RateLimited(FingractError):
    pass


class NoStructurePresent(FingractError):
    pass


class KeyMismatch(FingractError):
    def __init__(self, index: int, missing: set[str], extra: set[str]):
        super().__init__(
            f"record {index}: missing keys {sorted(missing)}, unexpected keys {sorted(extra)}"
        )
        self.index = index
        self.missing = missing
        self.extra = extra


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    top_p: float = 1.0
    n_samples: int = 1
    fresh_context: bool = True   # no prior conversation state reaches the model

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str

    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER_RE.findall(self.body))


_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


def render(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders in a single pass.

    Binding values are inserted verbatim; braces inside them are never
    re-expanded, and nothing is escaped.
    """

    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise UnboundPlaceholder(name)
        return bindings[name]

    return _PLACEHOLDER_RE.sub(substitute, template.body)


@dataclass
class RetryPolicy:
    attempts: int = 3
    base_delay_s: float = 1.0
    sleep: Callable[[float], None] = time.sleep


class MockReplayBackend:
    """Deterministic scripted backend.

    The script is either a plain cycle of completions (used for every
    prompt) or an ordered list of ``(match, responses)`` rules where
    ``match`` is a substring of the prompt (``None`` matches anything).
    Identical (prompt, params) always yield identical output.
    """

    def __init__(self, script, model_name: str = "mock"):
        self.model_name = model_name
        self.retry = RetryPolicy(attempts=1, base_delay_s=0.0)
        self._rules: list[tuple[str | None, tuple[str, ...]]] = []
        if isinstance(script, str):
            self._rules = [(None, (script,))]
        elif isinstance(script, Sequence) and script and all(isinstance(s, str) for s in script):
            self._rules = [(None, tuple(script))]
        else:
            for rule in script:
                if isinstance(rule, dict):
                    match, responses = rule.get("match"), rule["responses"]
                else:
                    match, responses = rule
                if isinstance(responses, str):
                    responses = (responses,)
                self._rules.append((match, tuple(responses)))

    def complete_once(self, prompt: str, params: DecodingParams) -> list[str]:
        for match, responses in self._rules:
            if match is None or match in prompt:
                return [responses[i % len(responses)] for i in range(params.n_samples)]
        raise BackendUnavailable("no scripted response matches the prompt")


class RemoteBackend:
    """OpenAI-style chat-completions endpoint over HTTP JSON.

    The API key is read from an environment variable and sent as a bearer
    token; concurrent in-flight requests are bounded by a semaphore.
    """

    def __init__(
        self,
        endpoint: str,
        model_name: str,
        api_key_env: str = "FINGRACT_API_KEY",
        timeout_s: float = 120.0,
        max_concurrency: int = 4,
        retry: RetryPolicy | None = None,
    ):
        self.endpoint = endpoint
        self.model_name = model_name
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.retry = retry or RetryPolicy()
        self._gate = threading.Semaphore(max_concurrency)

    def complete_once(self, prompt: str, params: DecodingParams) -> list[str]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "n": params.n_samples,
        }
        with self._gate:
            try:
                resp = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout_s)
            except requests.exceptions.RequestException as exc:
                raise BackendUnavailable(f"{self.endpoint}: {exc}") from exc
        if resp.status_code == 429:
            raise RateLimited(f"{self.endpoint} rate-limited the request")
        if not 200 <= resp.status_code < 300:
            raise BackendUnavailable(f"{self.endpoint} returned HTTP {resp.status_code}")
        try:
            choices = resp.json()["choices"]
            texts = [choice["message"]["content"] for choice in choices]
        except (ValueError, KeyError, TypeError) as exc:
            raise BackendUnavailable(f"malformed completion payload: {exc}") from exc
        if len(texts) != params.n_samples:
            raise BackendUnavailable(f"asked for {params.n_samples} samples, got {len(texts)}")
        return texts


class ResponseCache:
    """Content-addressed store: one JSON file per request hash, holding the
    full request and every sampled response.  Writes are atomic."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def key(self, request: dict) -> str:
        canonical = json.dumps(request, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> list[str] | None:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))["responses"]

    def put(self, key: str, request: dict, responses: list[str]) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=str(self.root), suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump({"request": request, "responses": list(responses)}, fh, ensure_ascii=False, indent=2)
        os.replace(tmp, self._path(key))


def complete(
    backend,
    prompt: str,
    params: DecodingParams,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    run_tag: str = "",
) -> list[str]:
    """Return exactly ``params.n_samples`` completion texts.

    A cache hit performs zero network I/O.  ``run_tag`` disambiguates
    otherwise-identical requests (e.g. independent runs of the same
    evaluation) so they are sampled and cached separately.  Transient
    failures are retried per the backend's policy with exponential backoff.
    """
    request = {
        "model": backend.model_name,
        "prompt": prompt,
        "temperature": params.temperature,
        "top_p": params.top_p,
        "n_samples": params.n_samples,
        "fresh_context": params.fresh_context,
        "run_tag": run_tag,
    }
    key = None
    if cache is not None:
        key = cache.key(request)
        hit = cache.get(key)
        if hit is not None:
            return hit
    if replay_only:
        raise BackendUnavailable(f"replay cache has no entry for request {key or '<uncached>'}")

    retry = getattr(backend, "retry", None) or RetryPolicy()
    last_exc: FingractError | None = None
    responses: list[str] | None = None
    for attempt in range(retry.attempts):
        try:
            responses = backend.complete_once(prompt, params)
            break
        except (RateLimited, BackendUnavailable) as exc:
            last_exc = exc
            if attempt + 1 < retry.attempts:
                retry.sleep(retry.base_delay_s * (2**attempt))
    if responses is None:
        assert last_exc is not None
        raise last_exc
    if cache is not None:
        cache.put(key, request, responses)
    return responses


# --- structured output parsing ------------------------------------------------

_CODE_FENCE_RE = re.compile(r"```[A-Za-z0-9_-]*")


def _candidate_spans(text: str):
    """Yield bracketed spans whose [ ] nest correctly outside string literals."""
    for start, ch in enumerate(text):
        if ch != "[":
            continue
        depth = 0
        quote: str | None = None
        escaped = False
        for pos in range(start, len(text)):
            c = text[pos]
            if escaped:
                escaped = False
                continue
            if quote is not None:
                if c == "\\":
                    escaped = True
                elif c == quote:
                    quote = None
                continue
            if c in "\"'":
                quote = c
            elif c in "[{":
                depth += 1
            elif c in "]}":
                depth -= 1
                if depth == 0:
                    if c == "]":
                        yield text[start : pos + 1]
                    break
                if depth < 0:
                    break


def _try_parse(span: str):
    try:
        return json.loads(span)
    except Exception:
        pass
    try:
        return ast.literal_eval(span)
    except Exception:
        return None


def _normalize_value(value):
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered == "yes":
            return True
        if lowered == "no":
            return False
    return value


def extract_structured_list(completion: str, expected_keys: Sequence[str]) -> list[dict]:
    """Pull the first well-formed list of records out of free-form text.

    Tolerates prose before/after the list and code fences around it, and
    accepts both JSON and Python-literal dict syntax.  Each record must have
    exactly ``expected_keys``; "Yes"/"No" values (any case) become booleans.
    Raises :class:`NoStructurePresent` or :class:`KeyMismatch`, never
    anything else, regardless of input.
    """
    text = _CODE_FENCE_RE.sub("", completion)
    expected = set(expected_keys)
    for span in _candidate_spans(text):
        parsed = _try_parse(span)
        if not isinstance(parsed, list):
            continue
        if not all(isinstance(r, dict) and all(isinstance(k, str) for k in r) for r in parsed):
            continue
        records: list[dict] = []
        for index, record in enumerate(parsed):
            keys = set(record)
            if keys != expected:
                raise KeyMismatch(index, expected - keys, keys - expected)
            records.append({k: _normalize_value(v) for k, v in record.items()})
        return records
    raise NoStructurePresent("no bracketed list of records found in completion")
