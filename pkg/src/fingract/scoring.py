"""Turn per-subclaim verdicts into an actionability score.

All arithmetic is exact rational: the full-coverage branch of the quantizer
must fire only when every subclaim is covered, so ratios are never floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import FingractError
from .model import ActionabilityScore, VerdictRecord

LIKERT_FACTOR = Fraction(5, 6)   # maps the 0..6 raw range onto 0..5


class OutOfRange(FingractError):
    pass


class EmptyRecords(FingractError):
    pass


class ModeMismatch(FingractError):
    pass


def categorize(ratio) -> int:
    """Quantize a coverage ratio: full -> 2, partial -> 1, none -> 0."""
    ratio = Fraction(ratio)
    if not 0 <= ratio <= 1:
        raise OutOfRange(f"coverage ratio {ratio} outside [0, 1]")
    if ratio == 1:
        return 2
    if ratio > 0:
        return 1
    return 0


def to_likert(raw) -> Fraction:
    """Scale a raw 0..6 total onto the 0..5 Likert range, exactly."""
    raw = Fraction(raw)
    if not 0 <= raw <= 6:
        raise OutOfRange(f"raw score {raw} outside [0, 6]")
    return raw * LIKERT_FACTOR


def _coverage(records: Sequence[VerdictRecord], pick) -> Fraction:
    return Fraction(sum(1 for r in records if pick(r)), len(records))


def score_with_ucr(records: Sequence[VerdictRecord]) -> ActionabilityScore:
    """Score verdicts judged against retrieved link content.

    Detection and correction each contribute up to 2 points; link existence
    up to 1; link relevance and support up to 0.5 each.  Records must be
    sanity-enforced first (supporting implies related implies existing).
    """
    if not records:
        raise EmptyRecords("cannot score an empty verdict list")
    if any(not r.with_ucr for r in records):
        raise ModeMismatch("record without link-content fields in a with-UCR scoring call")
    e_d = Fraction(categorize(_coverage(records, lambda r: r.response)))
    e_c = Fraction(categorize(_coverage(records, lambda r: r.correction)))
    l_e = Fraction(categorize(_coverage(records, lambda r: r.existing_links)), 2)
    l_r = Fraction(categorize(_coverage(records, lambda r: r.related_links)), 4)
    l_s = Fraction(categorize(_coverage(records, lambda r: r.supporting_links)), 4)
    raw = e_d + e_c + l_e + l_r + l_s
    return ActionabilityScore(e_d=e_d, e_c=e_c, l_e=l_e, l_r=l_r, l_s=l_s, raw=raw, likert=to_likert(raw))


def score_without_ucr(records: Sequence[VerdictRecord]) -> ActionabilityScore:
    """Score verdicts judged from model knowledge only.

    There is a single link boolean here, so it carries the whole two-point
    link budget, keeping both modes on the same 0..6 raw range.
    """
    if not records:
        raise EmptyRecords("cannot score an empty verdict list")
    if any(r.with_ucr for r in records):
        raise ModeMismatch("record with link-content fields in a without-UCR scoring call")
    e_d = Fraction(categorize(_coverage(records, lambda r: r.response)))
    e_c = Fraction(categorize(_coverage(records, lambda r: r.correction)))
    l_s = Fraction(categorize(_coverage(records, lambda r: r.supporting_links)))
    raw = e_d + e_c + l_s
    return ActionabilityScore(e_d=e_d, e_c=e_c, l_s=l_s, raw=raw, likert=to_likert(raw))
