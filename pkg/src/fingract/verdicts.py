"""Stages 2-3: judge whether each finding's error and correction can be
inferred from the explanation, and how its links hold up.

Returned records are aligned positionally with the findings, with a
secondary textual check that each record echoes the finding's reason;
misaligned or malformed output triggers a re-prompt.
"""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Sequence

from .errors import FingractError
from .gateway import (
    DecodingParams,
    KeyMismatch,
    NoStructurePresent,
    ResponseCache,
    complete,
    extract_structured_list,
    render,
)
from .model import SubclaimFinding, VerdictRecord
from .prompts import JUDGE_EXPLANATION, JUDGE_EXPLANATION_WITH_LINKS

JUDGE_PARAMS = DecodingParams(temperature=0.0, top_p=1.0, n_samples=1, fresh_context=True)
MAX_ATTEMPTS = 3

_PLAIN_KEYS = ("error", "response", "correction", "supporting_links")
_UCR_KEYS = ("error", "response", "correction", "existing_links", "related_links", "supporting_links")


class VerdictFailed(FingractError):
    pass


class LengthMismatch(FingractError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} verdict records, got {got}")
        self.expected = expected
        self.got = got


def _norm_ws(text: str) -> str:
    return " ".join(text.split())


def _format_items(items: Sequence[str]) -> str:
    return json.dumps(list(items), ensure_ascii=False)


class _Misaligned(FingractError):
    pass


def _to_records(parsed: list[dict], findings: Sequence[SubclaimFinding], with_ucr: bool) -> list[VerdictRecord]:
    bool_keys = _UCR_KEYS[1:] if with_ucr else _PLAIN_KEYS[1:]
    records: list[VerdictRecord] = []
    for finding, raw in zip(findings, parsed):
        for key in bool_keys:
            if not isinstance(raw[key], bool):
                raise _Misaligned(f"value for {key!r} is not a Yes/No answer: {raw[key]!r}")
        error = str(raw["error"])
        if _norm_ws(error) != _norm_ws(finding.reason):
            raise _Misaligned(f"record error {error!r} does not echo finding reason {finding.reason!r}")
        record = VerdictRecord(
            error=error,
            response=raw["response"],
            correction=raw["correction"],
            supporting_links=raw["supporting_links"],
            existing_links=raw["existing_links"] if with_ucr else None,
            related_links=raw["related_links"] if with_ucr else None,
        )
        records.append(record)
    return records


def _judge(
    findings: Sequence[SubclaimFinding],
    bindings: dict[str, str],
    template,
    keys: Sequence[str],
    with_ucr: bool,
    backend,
    cache: ResponseCache | None,
    replay_only: bool,
    max_attempts: int,
    run_tag: str,
) -> list[VerdictRecord]:
    if not findings:
        raise ValueError("findings must be non-empty")
    prompt = render(template, bindings)
    last_error: Exception | None = None
    for attempt in range(max_attempts):
        tag = run_tag if attempt == 0 else f"{run_tag}#retry{attempt}"
        [completion] = complete(
            backend, prompt, JUDGE_PARAMS, cache=cache, replay_only=replay_only, run_tag=tag
        )
        try:
            parsed = extract_structured_list(completion, keys)
        except (NoStructurePresent, KeyMismatch) as exc:
            last_error = exc
            continue
        if len(parsed) != len(findings):
            last_error = LengthMismatch(len(findings), len(parsed))
            continue
        try:
            return _to_records(parsed, findings, with_ucr)
        except _Misaligned as exc:
            last_error = exc
            continue
    if isinstance(last_error, LengthMismatch):
        raise last_error
    raise VerdictFailed(f"no usable verdict after {max_attempts} attempts: {last_error}")


def evaluate_explanation(
    findings: Sequence[SubclaimFinding],
    explanation: str,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    max_attempts: int = MAX_ATTEMPTS,
    run_tag: str = "",
) -> list[VerdictRecord]:
    """Judge error/correction coverage and link support from model knowledge
    alone (no retrieved content).  One record per finding, order preserved."""
    bindings = {
        "error_list": _format_items([f.reason for f in findings]),
        "corrections_list": _format_items([f.correction for f in findings]),
        "explanation": explanation,
    }
    return _judge(
        findings, bindings, JUDGE_EXPLANATION, _PLAIN_KEYS, False,
        backend, cache, replay_only, max_attempts, run_tag,
    )


def evaluate_explanation_with_sources(
    findings: Sequence[SubclaimFinding],
    explanation: str,
    links_content: str,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    max_attempts: int = MAX_ATTEMPTS,
    run_tag: str = "",
) -> list[VerdictRecord]:
    """Judge with retrieved link content in the prompt; the returned records
    carry all three link booleans and are sanity-enforced."""
    bindings = {
        "errors_list": _format_items([f.reason for f in findings]),
        "corrections_list": _format_items([f.correction for f in findings]),
        "explanation": explanation,
        "links_content": links_content,
    }
    records = _judge(
        findings, bindings, JUDGE_EXPLANATION_WITH_LINKS, _UCR_KEYS, True,
        backend, cache, replay_only, max_attempts, run_tag,
    )
    return [enforce_sanity(r) for r in records]


def enforce_sanity(record: VerdictRecord) -> VerdictRecord:
    """Make link booleans consistent: a link cannot be related unless it
    exists, nor supporting unless it exists and is related.  Idempotent and
    only ever turns True into False."""
    if record.existing_links is None or record.related_links is None:
        raise ValueError("sanity enforcement applies to records with link-content fields")
    related = record.related_links and record.existing_links
    supporting = record.supporting_links and related and record.existing_links
    return replace(record, related_links=related, supporting_links=supporting)
