"""G-Eval and Prometheus judges adapted to score actionability.

Both reuse their original decoding settings: G-Eval samples twenty
completions at temperature 1 and averages the parsed scores (the original
probability weighting needs log-probs, which commercial endpoints rarely
expose); Prometheus writes feedback and a single bracketed integer.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction

from .errors import FingractError
from .gateway import DecodingParams, ResponseCache, complete, render
from .model import EvalSample, Explanation
from .prompts import (
    GEVAL_ACTIONABILITY,
    GEVAL_ACTIONABILITY_WITH_LINKS,
    PROMETHEUS_ACTIONABILITY,
    PROMETHEUS_ACTIONABILITY_WITH_LINKS,
)

logger = logging.getLogger(__name__)

GEVAL_PARAMS = DecodingParams(temperature=1.0, top_p=1.0, n_samples=20, fresh_context=True)
PROMETHEUS_PARAMS = DecodingParams(temperature=1.0, top_p=0.9, n_samples=1, fresh_context=True)
MAX_ATTEMPTS = 3

_LABELED_SCORE_RE = re.compile(r"Actionability\s*:\s*(\d+)", re.IGNORECASE)
_BARE_INT_RE = re.compile(r"^\d+$")
_RESULT_RE = re.compile(r"\[RESULT\]\s*\(?\s*(\d+)")


class AllSamplesUnparseable(FingractError):
    pass


class ResultTokenMissing(FingractError):
    pass


def _parse_geval_sample(text: str) -> int | None:
    match = _LABELED_SCORE_RE.search(text)
    if match:
        value = int(match.group(1))
    elif _BARE_INT_RE.match(text.strip()):
        value = int(text.strip())
    else:
        return None
    return value if 1 <= value <= 5 else None


def geval_score(
    sample: EvalSample,
    explanation: Explanation,
    mode: str,
    backend,
    links_content: str | None = None,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    run_tag: str = "",
) -> Fraction:
    """Mean of the integer scores parsed from twenty sampled completions.

    Samples without a parseable score in 1..5 are dropped with a warning as
    long as at least half parse; below that the call fails.
    """
    if mode == "with_ucr":
        if links_content is None:
            raise ValueError("with_ucr mode needs the retrieved links content")
        template = GEVAL_ACTIONABILITY_WITH_LINKS
        bindings = {"link_content": links_content}
    elif mode == "plain":
        template = GEVAL_ACTIONABILITY
        bindings = {}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bindings.update(
        claim=sample.claim,
        evidence=sample.evidence,
        label=sample.label.display,
        explanation=explanation.text,
    )
    prompt = render(template, bindings)
    completions = complete(backend, prompt, GEVAL_PARAMS, cache=cache, replay_only=replay_only, run_tag=run_tag)
    parsed = [score for score in map(_parse_geval_sample, completions) if score is not None]
    if 2 * len(parsed) < len(completions):
        raise AllSamplesUnparseable(f"only {len(parsed)} of {len(completions)} samples held a score in 1..5")
    if len(parsed) < len(completions):
        logger.warning("dropped %d unparseable samples of %d", len(completions) - len(parsed), len(completions))
    return Fraction(sum(parsed), len(parsed))


def prometheus_score(
    sample: EvalSample,
    explanation: Explanation,
    mode: str,
    backend,
    links_content: str | None = None,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    max_attempts: int = MAX_ATTEMPTS,
    run_tag: str = "",
) -> tuple[int, str]:
    """Integer 1..5 parsed after the literal "[RESULT]" token, plus the
    feedback text that precedes it."""
    if mode == "with_ucr":
        if links_content is None:
            raise ValueError("with_ucr mode needs the retrieved links content")
        template = PROMETHEUS_ACTIONABILITY_WITH_LINKS
        bindings = {"link_content": links_content}
    elif mode == "plain":
        template = PROMETHEUS_ACTIONABILITY
        bindings = {}
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bindings.update(
        claim=sample.claim,
        evidence=sample.evidence,
        label=sample.label.display,
        response=explanation.text,
    )
    prompt = render(template, bindings)
    last_problem = "no completion requested"
    for attempt in range(max_attempts):
        tag = run_tag if attempt == 0 else f"{run_tag}#retry{attempt}"
        [completion] = complete(
            backend, prompt, PROMETHEUS_PARAMS, cache=cache, replay_only=replay_only, run_tag=tag
        )
        match = _RESULT_RE.search(completion)
        if not match:
            last_problem = "no [RESULT] token in completion"
            continue
        value = int(match.group(1))
        if not 1 <= value <= 5:
            last_problem = f"[RESULT] value {value} outside 1..5"
            continue
        feedback = completion[: match.start()].strip()
        if feedback.startswith("Feedback:"):
            feedback = feedback[len("Feedback:"):].strip()
        return value, feedback
    raise ResultTokenMissing(f"after {max_attempts} attempts: {last_problem}")
