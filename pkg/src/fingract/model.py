"""Core domain types shared by every pipeline stage.

All types are immutable values, safe to share across threads.  Scores are
exact rationals (``fractions.Fraction``) so equality checks never depend on
float rounding; use :func:`format_score` when rendering them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from fractions import Fraction

from .ucr import extract_urls


class Label(Enum):
    """Claim veracity.  Partially true claims still carry correctable errors
    and flow through the pipeline exactly like false ones."""

    TRUE = "true"
    FALSE = "false"
    PARTIALLY_TRUE = "partially_true"

    @property
    def display(self) -> str:
        return {"true": "True", "false": "False", "partially_true": "Partially True"}[self.value]


class ExplanationSource(Enum):
    DATASET = "dataset"
    GENERATED = "generated"


class ActionabilityCategory(Enum):
    # counterfactual explanation categories
    DETECTION_ONLY = "detection_only"
    CORRECTION_ONLY = "correction_only"
    DETECTION_AND_CORRECTION = "detection_and_correction"
    DETECTION_WITH_SOURCES = "detection_with_sources"
    CORRECTION_WITH_SOURCES = "correction_with_sources"
    DETECTION_CORRECTION_WITH_SOURCES = "detection_correction_with_sources"
    # evidence-summary explanation categories
    FALSE_WITH_SOURCES = "false_with_sources"
    FALSE_NO_SOURCES = "false_no_sources"
    PARTIAL_WITH_SOURCES = "partial_with_sources"
    PARTIAL_NO_SOURCES = "partial_no_sources"


@dataclass(frozen=True)
class Explanation:
    """One explanation under evaluation.  ``urls`` is derived from the text
    at construction time and kept in sync by never being settable."""

    source: ExplanationSource
    text: str
    model: str | None = None
    urls: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "urls", tuple(extract_urls(self.text)))


@dataclass(frozen=True)
class HumanAnnotation:
    """One annotator's rubric scores: detection and correction on 0..2,
    references on 0..3."""

    annotator_id: str
    detection: int
    correction: int
    references: int


@dataclass(frozen=True)
class EvalSample:
    id: str
    claim: str
    evidence: str
    label: Label
    explanations: tuple[Explanation, ...]
    category: ActionabilityCategory | None = None
    human_scores: tuple[HumanAnnotation, ...] = ()


@dataclass(frozen=True)
class SubclaimFinding:
    """A false atomic subclaim, why it is wrong, and how to fix it."""

    sentence: str
    reason: str
    correction: str


@dataclass(frozen=True)
class VerdictRecord:
    """Per-subclaim judge booleans.

    ``existing_links`` and ``related_links`` are populated only when link
    content was retrieved and judged; they stay ``None`` when the judge
    relied on its own knowledge of the links.
    """

    error: str
    response: bool
    correction: bool
    supporting_links: bool
    existing_links: bool | None = None
    related_links: bool | None = None

    @property
    def with_ucr(self) -> bool:
        return self.existing_links is not None and self.related_links is not None


@dataclass(frozen=True)
class ActionabilityScore:
    """Aggregated actionability components, all exact rationals.

    ``l_e`` and ``l_r`` are ``None`` when scoring without retrieved link
    content; ``l_s`` then carries the whole two-point link budget.
    """

    e_d: Fraction
    e_c: Fraction
    l_s: Fraction
    raw: Fraction
    likert: Fraction
    l_e: Fraction | None = None
    l_r: Fraction | None = None

    @property
    def with_ucr(self) -> bool:
        return self.l_e is not None and self.l_r is not None


def format_score(value: Fraction, places: int = 3) -> str:
    """Render an exact score as a fixed-point decimal (half-up)."""
    quantum = Decimal(1).scaleb(-places)
    return str((Decimal(value.numerator) / Decimal(value.denominator)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


def validate_sample(sample: EvalSample) -> list[Violation]:
    """Check every invariant of a sample; empty list means all hold."""
    violations: list[Violation] = []
    if not sample.claim.strip():
        violations.append(Violation("missing_claim", f"sample {sample.id!r} has an empty claim"))
    if not sample.evidence.strip():
        violations.append(Violation("missing_evidence", f"sample {sample.id!r} has empty evidence"))
    if not sample.explanations:
        violations.append(Violation("no_explanations", f"sample {sample.id!r} has no explanations"))
    for i, explanation in enumerate(sample.explanations):
        if not explanation.text.strip():
            violations.append(Violation("empty_explanation", f"explanation {i} is empty"))
        if explanation.source is ExplanationSource.GENERATED and not explanation.model:
            violations.append(Violation("missing_model", f"generated explanation {i} names no model"))
        if tuple(extract_urls(explanation.text)) != explanation.urls:
            violations.append(Violation("urls_out_of_sync", f"explanation {i} urls are stale"))
    ranges = {"detection": (0, 2), "correction": (0, 2), "references": (0, 3)}
    for annotation in sample.human_scores:
        for fieldname, (lo, hi) in ranges.items():
            value = getattr(annotation, fieldname)
            if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
                violations.append(
                    Violation(
                        "range_violation",
                        f"annotator {annotation.annotator_id!r}: {fieldname}={value!r} outside {lo}..{hi}",
                    )
                )
    return violations
