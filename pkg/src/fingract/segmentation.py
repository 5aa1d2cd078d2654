"""Stage 1: decompose a claim into atomic subclaims against the evidence.

The backend is asked for a JSON list of (sentence, reason, correction)
records; records flagged with the configured no-error sentinel are dropped,
so an empty result means the claim is fully supported by the evidence.
"""

from __future__ import annotations

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
from .model import SubclaimFinding
from .prompts import SEGMENT_CLAIM

SEGMENTATION_PARAMS = DecodingParams(temperature=0.0, top_p=1.0, n_samples=1, fresh_context=True)
NO_ERROR_SENTINEL = "no error"
MAX_ATTEMPTS = 3

_KEYS = ("sentence", "reason", "correction")


class SegmentationFailed(FingractError):
    pass


def _as_text(value) -> str:
    if isinstance(value, bool):
        return "Yes" if value else "No"
    return str(value).strip()


def segment_and_correct(
    claim: str,
    evidence: str,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    no_error_sentinel: str = NO_ERROR_SENTINEL,
    max_attempts: int = MAX_ATTEMPTS,
    run_tag: str = "",
) -> list[SubclaimFinding]:
    """Return one finding per false subclaim, in the backend's order.

    Re-prompts up to ``max_attempts`` times on unparseable output before
    giving up with :class:`SegmentationFailed`; an empty list is a valid
    result, not a failure.
    """
    if not claim.strip():
        raise ValueError("claim must be non-empty")
    if not evidence.strip():
        raise ValueError("evidence must be non-empty")
    prompt = render(SEGMENT_CLAIM, {"claim": claim, "evidence": evidence})
    sentinel = no_error_sentinel.strip().casefold()
    last_error: Exception | None = None
    for attempt in range(max_attempts):
        tag = run_tag if attempt == 0 else f"{run_tag}#retry{attempt}"
        [completion] = complete(
            backend, prompt, SEGMENTATION_PARAMS, cache=cache, replay_only=replay_only, run_tag=tag
        )
        try:
            records = extract_structured_list(completion, _KEYS)
        except (NoStructurePresent, KeyMismatch) as exc:
            last_error = exc
            continue
        findings: list[SubclaimFinding] = []
        malformed = False
        for record in records:
            reason = _as_text(record["reason"])
            if reason.casefold() == sentinel:
                continue   # subclaim judged factually consistent
            sentence = _as_text(record["sentence"])
            correction = _as_text(record["correction"])
            if not (sentence and reason and correction):
                malformed = True
                break
            findings.append(SubclaimFinding(sentence=sentence, reason=reason, correction=correction))
        if malformed:
            last_error = NoStructurePresent("record with an empty field")
            continue
        return findings
    raise SegmentationFailed(f"no parseable segmentation after {max_attempts} attempts: {last_error}")
