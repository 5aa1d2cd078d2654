"""Meta-evaluation on synthetic data: correlations with human scores,
inter-annotator agreement, bias counting, and run averaging.

    python demos/meta_evaluation.py
"""

import random
from fractions import Fraction

from fingract.metaeval import (
    average_runs,
    bias_report,
    build_report,
    kendall_tau,
    krippendorff_alpha,
    pearson,
)


def main() -> None:
    rng = random.Random(7)

    # Human ground truth for 40 samples, and two synthetic evaluators:
    # one tracking the humans closely, one inflating its own scores.
    human = [Fraction(rng.randint(0, 20), 4) for _ in range(40)]
    faithful = [min(Fraction(5), h + Fraction(rng.randint(-2, 2), 4)) for h in human]
    flattering = [min(Fraction(5), h + Fraction(rng.randint(0, 10), 4)) for h in human]

    for name, scores in [("faithful", faithful), ("flattering", flattering)]:
        r, r_p = pearson([float(s) for s in scores], [float(h) for h in human])
        tau, tau_p = kendall_tau([float(s) for s in scores], [float(h) for h in human])
        bias = bias_report(scores, human)
        print(f"{name:>10}: pearson {r:.3f} (p={r_p:.3g})  kendall {tau:.3f} (p={tau_p:.3g})  "
              f"over={bias.overestimates} under={bias.underestimates}")

    # Three annotators who mostly agree.
    items = 25
    base = [rng.randint(0, 5) for _ in range(items)]
    ratings = [
        [min(5, max(0, v + rng.choice([0, 0, 0, 1, -1]))) for v in base]
        for _ in range(3)
    ]
    alpha = krippendorff_alpha(ratings)
    print(f"\nKrippendorff alpha across 3 annotators on {items} items: {alpha:.3f}")

    # Averaging several runs of one evaluator, with half-up rounding.
    runs = [[4, 2, 5], [5, 2, 4], [4, 2, 4]]
    means, rounded = average_runs(runs)
    print("\nPer-sample run averaging:")
    for index, (mean, rnd) in enumerate(zip(means, rounded)):
        print(f"  sample {index}: runs {[run[index] for run in runs]} -> mean {float(mean):.3f} -> {rnd}")

    report = build_report("faithful", "plain", [faithful], human)
    print(f"\nFull report object: n={report.n_samples} pearson={report.pearson_r:.3f} "
          f"over={report.overestimates} under={report.underestimates} in_tol={report.in_tolerance}")


if __name__ == "__main__":
    main()
