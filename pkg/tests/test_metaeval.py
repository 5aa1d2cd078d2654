import math
import random
from fractions import Fraction

import pytest

from fingract.metaeval import (
    BiasReport,
    DegenerateInput,
    InsufficientData,
    average_runs,
    bias_report,
    build_report,
    kendall_tau,
    krippendorff_alpha,
    pearson,
)


class TestPearson:
    def test_identity_is_one(self):
        r, p = pearson([1, 2, 3], [1, 2, 3])
        assert r == pytest.approx(1.0)
        assert p == pytest.approx(0.0)

    def test_reversal_is_minus_one(self):
        r, _ = pearson([1, 2, 3], [3, 2, 1])
        assert r == pytest.approx(-1.0)

    def test_oracle_checked_vector(self):
        # frozen from an independent hand computation (formula + t distribution)
        r, p = pearson([0, 1, 2, 5], [1, 1, 3, 4])
        assert r == pytest.approx(0.9258200997725514, abs=1e-12)
        assert p == pytest.approx(0.07417990022744855, abs=1e-12)

    def test_constant_vector_is_degenerate(self):
        with pytest.raises(DegenerateInput):
            pearson([2, 2, 2], [1, 2, 3])

    def test_positive_scaling_invariance(self):
        rng = random.Random(1)
        xs = [rng.uniform(0, 5) for _ in range(8)]
        ys = [rng.uniform(0, 5) for _ in range(8)]
        base, _ = pearson(xs, ys)
        scaled, _ = pearson([3.5 * x + 2 for x in xs], ys)
        flipped, _ = pearson([-2 * x + 1 for x in xs], ys)
        assert scaled == pytest.approx(base, abs=1e-12)
        assert flipped == pytest.approx(-base, abs=1e-12)

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2])


class TestKendall:
    def test_identity_is_one(self):
        tau, _ = kendall_tau([1, 2, 3], [1, 2, 3])
        assert tau == pytest.approx(1.0)

    def test_reversal_is_minus_one(self):
        tau, _ = kendall_tau([1, 2, 3], [3, 2, 1])
        assert tau == pytest.approx(-1.0)

    def test_oracle_checked_tied_vectors(self):
        # frozen from an independent pairwise computation with tie corrections
        tau, p = kendall_tau([1, 1, 2, 3], [1, 2, 2, 3])
        assert tau == pytest.approx(0.8, abs=1e-12)
        assert p == pytest.approx(0.12597116307723114, abs=1e-12)

    def test_invariant_under_monotone_transform(self):
        xs = [1, 4, 2, 8, 5, 7]
        ys = [2, 3, 1, 9, 4, 6]
        base, _ = kendall_tau(xs, ys)
        transformed, _ = kendall_tau([math.exp(x) for x in xs], ys)
        assert transformed == pytest.approx(base, abs=1e-12)

    def test_constant_vector_is_degenerate(self):
        with pytest.raises(DegenerateInput):
            kendall_tau([1, 1, 1], [1, 2, 3])


class TestKrippendorff:
    def test_perfect_agreement_is_one(self):
        assert krippendorff_alpha([[1, 2, 3, 4], [1, 2, 3, 4]]) == 1.0

    def test_hand_computed_single_disagreement(self):
        # 3 annotators x 4 items, one rating off by one unit; coincidence
        # matrix worked out by hand gives 216/227
        matrix = [[1, 2, 3, 4], [1, 2, 3, 4], [1, 2, 3, 5]]
        assert krippendorff_alpha(matrix) == pytest.approx(216 / 227, abs=1e-12)

    def test_single_rating_per_item_is_insufficient(self):
        matrix = [[1, None, 2], [None, 3, None]]
        with pytest.raises(InsufficientData):
            krippendorff_alpha(matrix)

    def test_missing_ratings_are_skipped(self):
        matrix = [[1, 2, None, 4], [1, 2, 3, 4], [1, None, 3, 4]]
        assert krippendorff_alpha(matrix) == 1.0

    def test_removing_annotator_keeps_perfect_agreement(self):
        matrix = [[1, 2, 3, 4], [1, 2, 3, 4], [1, 2, 3, 4]]
        assert krippendorff_alpha(matrix) == 1.0
        assert krippendorff_alpha(matrix[:2]) == 1.0

    def test_identical_constant_ratings(self):
        assert krippendorff_alpha([[2, 2], [2, 2]]) == 1.0

    def test_one_annotator_rejected(self):
        with pytest.raises(InsufficientData):
            krippendorff_alpha([[1, 2, 3]])

    def test_unsupported_metric_rejected(self):
        with pytest.raises(ValueError):
            krippendorff_alpha([[1, 2], [1, 2]], metric="ordinal")


class TestBiasReport:
    def test_overestimate_boundary(self):
        report = bias_report([4], [2])
        assert (report.overestimates, report.underestimates, report.in_tolerance) == (1, 0, 0)

    def test_within_tolerance_excluded_from_bias(self):
        report = bias_report([3], [2])
        assert report.overestimates == 0 and report.underestimates == 0
        assert report.in_tolerance == 1

    def test_underestimate_boundary(self):
        report = bias_report([3], [5])
        assert report.underestimates == 1

    def test_not_applicable_excluded(self):
        report = bias_report([None, 4], [2, 2])
        assert report.excluded_na == 1 and report.overestimates == 1

    def test_partition_property(self):
        rng = random.Random(13)
        evaluator = []
        human = []
        for _ in range(1000):
            evaluator.append(None if rng.random() < 0.1 else Fraction(rng.randint(0, 20), 4))
            human.append(None if rng.random() < 0.1 else Fraction(rng.randint(0, 20), 4))
        report = bias_report(evaluator, human)
        assert report.n == 1000
        assert (
            report.overestimates + report.underestimates + report.in_tolerance + report.excluded_na == 1000
        )

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            bias_report([1], [1, 2])


class TestAverageRuns:
    def test_three_runs_one_sample(self):
        means, rounded = average_runs([[4], [5], [4]])
        assert means == [Fraction(13, 3)]
        assert rounded == [4]

    def test_constant_runs(self):
        means, rounded = average_runs([[2, 3], [2, 3], [2, 3]])
        assert means == [2, 3] and rounded == [2, 3]

    def test_multi_run_bias_count_averaging(self):
        # three per-run bias counts averaging to a whole-number report
        means, rounded = average_runs([[113], [101], [84]])
        assert means == [Fraction(298, 3)]
        assert rounded == [99]

    def test_half_rounds_up(self):
        means, rounded = average_runs([[3], [4]])
        assert means == [Fraction(7, 2)]
        assert rounded == [4]

    def test_missing_score_propagates(self):
        means, rounded = average_runs([[4, None], [4, 3]])
        assert means == [4, None] and rounded == [4, None]

    def test_unequal_runs_rejected(self):
        with pytest.raises(ValueError):
            average_runs([[1, 2], [1]])


class TestBuildReport:
    def test_evaluator_matching_humans_exactly(self):
        humans = [Fraction(1), Fraction(2), Fraction(3), Fraction(4)]
        report = build_report("fingract", "plain", [humans, humans, humans], humans)
        assert report.pearson_r == pytest.approx(1.0)
        assert report.kendall_tau == pytest.approx(1.0)
        assert report.overestimates == 0 and report.underestimates == 0
        assert report.n_samples == 4
        assert len(report.per_run) == 3
        assert all(isinstance(b, BiasReport) for b in report.per_run)

    def test_consistent_overestimation_counted(self):
        humans = [Fraction(0), Fraction(1), Fraction(2), Fraction(3)]
        inflated = [h + 2 for h in humans]
        report = build_report("geval", "plain", [inflated], humans)
        assert report.overestimates == 4
        assert report.rounded_overestimates == 4
        assert report.pearson_r == pytest.approx(1.0)

    def test_na_scores_excluded_from_correlation(self):
        humans = [Fraction(1), Fraction(2), Fraction(3), Fraction(4)]
        run = [Fraction(1), None, Fraction(3), Fraction(4)]
        report = build_report("fingract", "plain", [run], humans)
        assert report.excluded_na == 1
        assert report.pearson_r == pytest.approx(1.0)
