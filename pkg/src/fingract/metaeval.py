"""Meta-evaluation: how well an evaluator's scores track human judgments.

Correlations come with p-values (t approximation for Pearson, normal
approximation with tie corrections for Kendall's tau-b), agreement uses the
interval-metric coincidence formulation of Krippendorff's alpha, and bias
counting applies the two-point-gap rule to aligned score vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import norm as _normal_dist
from scipy.stats import t as _t_dist

from .errors import FingractError


class DegenerateInput(FingractError):
    pass


class InsufficientData(FingractError):
    pass


def pearson(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Sample Pearson r with a two-sided p-value (t approximation)."""
    if len(xs) != len(ys):
        raise ValueError("vectors must have equal length")
    n = len(xs)
    if n < 3:
        raise ValueError("need at least 3 paired observations")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("constant vector has no defined correlation")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if 1 - r * r <= 0:
        return r, 0.0
    t_stat = r * math.sqrt((n - 2) / (1 - r * r))
    p = 2 * float(_t_dist.sf(abs(t_stat), n - 2))
    return r, p


def kendall_tau(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected Kendall tau-b with a normal-approximation p-value."""
    if len(xs) != len(ys):
        raise ValueError("vectors must have equal length")
    n = len(xs)
    if n < 3:
        raise ValueError("need at least 3 paired observations")
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = (xs[i] > xs[j]) - (xs[i] < xs[j])
            b = (ys[i] > ys[j]) - (ys[i] < ys[j])
            s += a * b

    def _tie_sizes(values) -> list[int]:
        counts: dict[float, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        return [c for c in counts.values() if c > 1]

    tx = _tie_sizes(xs)
    ty = _tie_sizes(ys)
    n0 = n * (n - 1) // 2
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(t * (t - 1) // 2 for t in ty)
    if n0 == n1 or n0 == n2:
        raise DegenerateInput("constant vector has no defined rank correlation")
    tau = s / math.sqrt((n0 - n1) * (n0 - n2))
    tau = max(-1.0, min(1.0, tau))

    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ty)
    v1 = sum(t * (t - 1) for t in tx) * sum(t * (t - 1) for t in ty) / (2 * n * (n - 1))
    v2 = (
        sum(t * (t - 1) * (t - 2) for t in tx)
        * sum(t * (t - 1) * (t - 2) for t in ty)
        / (9 * n * (n - 1) * (n - 2))
    )
    var_s = (v0 - vt - vu) / 18 + v1 + v2
    if var_s <= 0:
        return tau, 1.0
    z = s / math.sqrt(var_s)
    p = 2 * float(_normal_dist.sf(abs(z)))
    return tau, p


def krippendorff_alpha(ratings: Sequence[Sequence[float | None]], metric: str = "interval") -> float:
    """Chance-corrected inter-annotator agreement.

    ``ratings`` is annotator-major: one row per annotator, one column per
    item, ``None`` for a missing rating.  Only the interval metric
    (squared difference) is implemented; items need at least two ratings
    to contribute.
    """
    if metric != "interval":
        raise ValueError(f"unsupported metric {metric!r}")
    if len(ratings) < 2:
        raise InsufficientData("need at least two annotators")
    widths = {len(row) for row in ratings}
    if len(widths) != 1:
        raise ValueError("all annotators must rate the same item list")
    (n_items,) = widths

    units: list[list[Fraction]] = []
    for item in range(n_items):
        values = [Fraction(row[item]) for row in ratings if row[item] is not None]
        if len(values) > 1:
            units.append(values)
    if not units:
        raise InsufficientData("no item carries two or more ratings")

    n_pairable = sum(len(values) for values in units)
    observed = Fraction(0)
    for values in units:
        within = sum((a - b) ** 2 for a in values for b in values)
        observed += Fraction(within, len(values) - 1)
    observed = Fraction(observed, n_pairable)

    pooled = [v for values in units for v in values]
    expected = sum((a - b) ** 2 for a in pooled for b in pooled)
    expected = Fraction(expected, n_pairable * (n_pairable - 1))
    if expected == 0:
        return 1.0
    return float(1 - observed / expected)


@dataclass(frozen=True)
class BiasReport:
    """Partition of aligned score pairs by the two-point-gap rule.

    A pair lands in exactly one bucket: evaluator at least 2 above human is
    an overestimate, at least 2 below an underestimate, smaller gaps are
    within tolerance (excluded from bias counting), and pairs with a missing
    score on either side are excluded as not applicable.
    """

    overestimates: int
    underestimates: int
    in_tolerance: int
    excluded_na: int

    @property
    def n(self) -> int:
        return self.overestimates + self.underestimates + self.in_tolerance + self.excluded_na


def bias_report(evaluator_scores: Sequence, human_scores: Sequence) -> BiasReport:
    if len(evaluator_scores) != len(human_scores):
        raise ValueError("score vectors must have equal length")
    over = under = tolerated = missing = 0
    for evaluated, human in zip(evaluator_scores, human_scores):
        if evaluated is None or human is None:
            missing += 1
        elif evaluated - human >= 2:
            over += 1
        elif human - evaluated >= 2:
            under += 1
        else:
            tolerated += 1
    return BiasReport(overestimates=over, underestimates=under, in_tolerance=tolerated, excluded_na=missing)


def average_runs(per_run_scores: Sequence[Sequence]) -> tuple[list[Fraction | None], list[int | None]]:
    """Per-sample mean across runs, plus its half-up rounded integer.

    A sample missing a score in any run averages to ``None``.
    """
    if not per_run_scores:
        raise ValueError("need at least one run")
    lengths = {len(run) for run in per_run_scores}
    if len(lengths) != 1:
        raise ValueError("runs must have equal length")
    means: list[Fraction | None] = []
    rounded: list[int | None] = []
    for values in zip(*per_run_scores):
        if any(v is None for v in values):
            means.append(None)
            rounded.append(None)
            continue
        mean = Fraction(sum(Fraction(v) for v in values), len(values))
        means.append(mean)
        rounded.append(math.floor(mean + Fraction(1, 2)))
    return means, rounded


@dataclass(frozen=True)
class MetaEvalReport:
    """One evaluator's agreement with the human ground truth."""

    evaluator: str
    mode: str
    n_samples: int
    pearson_r: float
    pearson_p: float
    kendall_tau: float
    kendall_p: float
    overestimates: int
    underestimates: int
    in_tolerance: int
    excluded_na: int
    rounded_overestimates: int
    rounded_underestimates: int
    per_run: tuple[BiasReport, ...] = ()
    krippendorff: float | None = None


def build_report(
    evaluator: str,
    mode: str,
    per_run_scores: Sequence[Sequence],
    human_scores: Sequence,
    krippendorff: float | None = None,
) -> MetaEvalReport:
    """Average the runs, correlate against humans, and count bias cases.

    Bias thresholds are applied to the raw per-sample means; the counts on
    half-up rounded means are reported alongside.
    """
    means, rounded = average_runs(per_run_scores)
    if len(means) != len(human_scores):
        raise ValueError("human scores must align with per-sample results")
    paired = [(float(m), float(h)) for m, h in zip(means, human_scores) if m is not None and h is not None]
    if len(paired) < 3:
        raise InsufficientData(f"only {len(paired)} samples carry both an evaluator and a human score")
    xs = [p[0] for p in paired]
    ys = [p[1] for p in paired]
    r, r_p = pearson(xs, ys)
    tau, tau_p = kendall_tau(xs, ys)
    bias = bias_report(means, list(human_scores))
    bias_rounded = bias_report(rounded, list(human_scores))
    per_run = tuple(bias_report(list(run), list(human_scores)) for run in per_run_scores)
    return MetaEvalReport(
        evaluator=evaluator,
        mode=mode,
        n_samples=len(means),
        pearson_r=r,
        pearson_p=r_p,
        kendall_tau=tau,
        kendall_p=tau_p,
        overestimates=bias.overestimates,
        underestimates=bias.underestimates,
        in_tolerance=bias.in_tolerance,
        excluded_na=bias.excluded_na,
        rounded_overestimates=bias_rounded.overestimates,
        rounded_underestimates=bias_rounded.underestimates,
        per_run=per_run,
        krippendorff=krippendorff,
    )
