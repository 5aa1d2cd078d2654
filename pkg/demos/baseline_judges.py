"""The adapted single-prompt judges, run against scripted backends.

    python demos/baseline_judges.py
"""

from fingract.baselines import geval_score, prometheus_score
from fingract.gateway import MockReplayBackend
from fingract.model import EvalSample, Explanation, ExplanationSource, Label

SAMPLE = EvalSample(
    id="junun",
    claim="Junun is a book.",
    evidence="Junun is a 2015 documentary film directed by Paul Thomas Anderson.",
    label=Label.FALSE,
    explanations=(
        Explanation(
            ExplanationSource.DATASET,
            "If we were to say 'Junun is a 2015 documentary film' instead of 'book', the claim would be correct. "
            "https://en.wikipedia.org/wiki/Junun_(film)",
        ),
    ),
)


def main() -> None:
    explanation = SAMPLE.explanations[0]

    # The sampling judge draws 20 completions and averages the parsed scores;
    # the script cycles through slightly disagreeing samples.
    sampling_backend = MockReplayBackend(["Actionability: 4", "Actionability: 5", "4", "Actionability: 4"])
    mean = geval_score(SAMPLE, explanation, "plain", sampling_backend)
    print(f"sampling judge, 20 draws averaged: {float(mean):.3f}")

    # The rubric judge returns written feedback plus one bracketed integer.
    rubric_backend = MockReplayBackend(
        "Feedback: The response names the error, corrects it to 'film', and links a relevant page. [RESULT] 5"
    )
    score, feedback = prometheus_score(SAMPLE, explanation, "plain", rubric_backend)
    print(f"rubric judge: {score}")
    print(f"  feedback: {feedback}")

    # Both judges accept retrieved link content for their with-links variants.
    ucr_backend = MockReplayBackend("Actionability: 5")
    links_block = "URL: https://en.wikipedia.org/wiki/Junun_(film)\nStatus: working\nContent: Junun is a 2015 documentary film."
    with_links = geval_score(SAMPLE, explanation, "with_ucr", ucr_backend, links_content=links_block)
    print(f"sampling judge with retrieved link content: {float(with_links):.3f}")


if __name__ == "__main__":
    main()
