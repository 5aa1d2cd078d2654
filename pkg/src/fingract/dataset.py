"""Dataset file IO, human-score normalization, and generation flows.

The on-disk format is JSON Lines, one sample per line; the exact field
names are documented in the README's format reference.  Structural problems
(bad JSON, missing or mistyped fields) raise :class:`ParseError` with the
line number; semantic problems (unknown enum values, rubric scores out of
range) raise :class:`ValidationError`.
"""

from __future__ import annotations

import json
import math
import random
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FingractError
from .gateway import DecodingParams, ResponseCache, complete, render
from .model import (
    ActionabilityCategory,
    EvalSample,
    Explanation,
    ExplanationSource,
    HumanAnnotation,
    Label,
    Violation,
    validate_sample,
)
from .prompts import GENERATE_EXPLANATION, GENERATE_SUPPORTING_LINK
from .ucr import extract_urls

GENERATION_PARAMS = DecodingParams(temperature=1.0, top_p=1.0, n_samples=1, fresh_context=True)

# rubric maximum: detection 2 + correction 2 + references 3
_RUBRIC_MAX = 7


class ParseError(FingractError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(FingractError):
    def __init__(self, line: int, violations: Sequence[Violation | str]):
        detail = "; ".join(str(v) for v in violations)
        super().__init__(f"line {line}: {detail}")
        self.line = line
        self.violations = tuple(violations)


class NoUrlInCompletion(FingractError):
    pass


def _require(obj: dict, key: str, line: int):
    if key not in obj:
        raise ParseError(line, f"missing field {key!r}")
    return obj[key]


def _parse_explanation(obj, index: int, line: int) -> Explanation:
    if not isinstance(obj, dict):
        raise ParseError(line, f"explanations[{index}] is not an object")
    source_raw = _require(obj, "source", line)
    text = _require(obj, "text", line)
    if not isinstance(text, str):
        raise ParseError(line, f"explanations[{index}].text is not a string")
    try:
        source = ExplanationSource(source_raw)
    except ValueError:
        raise ValidationError(line, [f"explanations[{index}].source {source_raw!r} is not a known source"])
    model = obj.get("model")
    if source is ExplanationSource.GENERATED and not model:
        raise ParseError(line, f"explanations[{index}] is generated but names no model")
    return Explanation(source=source, text=text, model=model)


def _parse_annotation(obj, index: int, line: int) -> HumanAnnotation:
    if not isinstance(obj, dict):
        raise ParseError(line, f"human_annotations[{index}] is not an object")
    annotator = _require(obj, "annotator_id", line)
    fields = {}
    for name in ("detection", "correction", "references"):
        value = _require(obj, name, line)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError(line, f"human_annotations[{index}].{name} is not an integer")
        fields[name] = value
    return HumanAnnotation(annotator_id=str(annotator), **fields)


def _parse_sample(obj: dict, line: int) -> EvalSample:
    if not isinstance(obj, dict):
        raise ParseError(line, "record is not an object")
    sample_id = _require(obj, "id", line)
    claim = _require(obj, "claim", line)
    evidence = _require(obj, "evidence", line)
    label_raw = _require(obj, "label", line)
    explanations_raw = _require(obj, "explanations", line)
    if not isinstance(explanations_raw, list):
        raise ParseError(line, "explanations is not a list")
    try:
        label = Label(label_raw)
    except ValueError:
        raise ValidationError(line, [f"label {label_raw!r} is not one of true/false/partially_true"])
    category = None
    if obj.get("category") is not None:
        try:
            category = ActionabilityCategory(obj["category"])
        except ValueError:
            raise ValidationError(line, [f"category {obj['category']!r} is not a known category"])
    explanations = tuple(_parse_explanation(e, i, line) for i, e in enumerate(explanations_raw))
    annotations = tuple(
        _parse_annotation(a, i, line) for i, a in enumerate(obj.get("human_annotations", []))
    )
    return EvalSample(
        id=str(sample_id),
        claim=str(claim),
        evidence=str(evidence),
        label=label,
        explanations=explanations,
        category=category,
        human_scores=annotations,
    )


def load_dataset(path: str | Path) -> list[EvalSample]:
    """Parse and validate a JSONL dataset; all samples or a located error."""
    samples: list[EvalSample] = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"invalid JSON: {exc}") from exc
            sample = _parse_sample(obj, line_number)
            violations = validate_sample(sample)
            if violations:
                raise ValidationError(line_number, violations)
            samples.append(sample)
    return samples


def _explanation_to_obj(explanation: Explanation) -> dict:
    obj: dict = {"source": explanation.source.value}
    if explanation.model is not None:
        obj["model"] = explanation.model
    obj["text"] = explanation.text
    return obj


def sample_to_obj(sample: EvalSample) -> dict:
    obj: dict = {
        "id": sample.id,
        "claim": sample.claim,
        "evidence": sample.evidence,
        "label": sample.label.value,
    }
    if sample.category is not None:
        obj["category"] = sample.category.value
    obj["explanations"] = [_explanation_to_obj(e) for e in sample.explanations]
    if sample.human_scores:
        obj["human_annotations"] = [
            {
                "annotator_id": a.annotator_id,
                "detection": a.detection,
                "correction": a.correction,
                "references": a.references,
            }
            for a in sample.human_scores
        ]
    return obj


def save_dataset(samples: Iterable[EvalSample], path: str | Path) -> None:
    """Write samples as JSONL; loading the file back yields equal samples."""
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_obj(sample), ensure_ascii=False))
            fh.write("\n")


def normalize_human_scores(annotation: HumanAnnotation) -> Fraction:
    """Map a rubric annotation onto the 0..5 scale by linear scaling of the
    0..7 rubric total."""
    total = annotation.detection + annotation.correction + annotation.references
    return Fraction(total) * Fraction(5, _RUBRIC_MAX)


def human_mean(sample: EvalSample) -> Fraction | None:
    """Mean normalized score across the sample's annotators, if any."""
    if not sample.human_scores:
        return None
    scores = [normalize_human_scores(a) for a in sample.human_scores]
    return Fraction(sum(scores), len(scores))


def category_counts(samples: Sequence[EvalSample]) -> dict[str, int]:
    """Histogram of category tags; uncategorized samples count under None's key."""
    counts: dict[str, int] = {}
    for sample in samples:
        key = sample.category.value if sample.category else "uncategorized"
        counts[key] = counts.get(key, 0) + 1
    return counts


def generate_explanation(
    claim: str,
    evidence: str,
    label: Label,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    run_tag: str = "",
) -> Explanation:
    """Ask a backend for an actionable explanation of the label."""
    if not claim.strip() or not evidence.strip():
        raise ValueError("claim and evidence must be non-empty")
    prompt = render(GENERATE_EXPLANATION, {"claim": claim, "evidence": evidence, "label": label.display})
    [completion] = complete(backend, prompt, GENERATION_PARAMS, cache=cache, replay_only=replay_only, run_tag=run_tag)
    return Explanation(source=ExplanationSource.GENERATED, text=completion, model=backend.model_name)


def generate_supporting_link(
    explanation_text: str,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    run_tag: str = "",
) -> str:
    """Ask a backend for one supporting URL for an explanation."""
    if not explanation_text.strip():
        raise ValueError("explanation must be non-empty")
    prompt = render(GENERATE_SUPPORTING_LINK, {"explanation": explanation_text})
    [completion] = complete(backend, prompt, GENERATION_PARAMS, cache=cache, replay_only=replay_only, run_tag=run_tag)
    urls = extract_urls(completion)
    if not urls:
        raise NoUrlInCompletion("completion contains no http(s) URL")
    return urls[0]


def select_for_link_augmentation(ids: Sequence[str], fraction: float, seed: int) -> list[str]:
    """Deterministic seeded choice of which samples receive a generated link.

    Picks exactly ``round(fraction * len(ids))`` ids (half-up), returned in
    their original order.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must be within [0, 1]")
    k = math.floor(fraction * len(ids) + 0.5)
    chosen = set(random.Random(seed).sample(list(ids), k))
    return [i for i in ids if i in chosen]
