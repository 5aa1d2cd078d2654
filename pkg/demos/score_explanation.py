"""Walk one explanation through the whole scoring pipeline, offline.

A scripted backend stands in for the LLM and a pre-warmed page cache stands
in for the web, so this runs with no network and no API key:

    python demos/score_explanation.py
"""

import tempfile
from pathlib import Path

from fingract import (
    EvalSample,
    Explanation,
    ExplanationSource,
    Label,
    MockReplayBackend,
    format_score,
)
from fingract.runner import fingract_score
from fingract.segmentation import segment_and_correct
from fingract.ucr import FetchPolicy, FetchResult, cache_store
from fingract.verdicts import evaluate_explanation
from fingract.scoring import score_without_ucr

CLAIM = "Earth is flat and red."
EVIDENCE = "Nasa images shows that Eart is a blue marble shaped planet."
EXPLANATION = (
    "The claim has two errors in earth's description. The errors are in the words 'flat' and 'red'. "
    'The correct version of the claim is : "Earth is round and blue". '
    "Check NASA images at https://explorer1.jpl.nasa.gov/galleries/earth-from-space"
)
URL = "https://explorer1.jpl.nasa.gov/galleries/earth-from-space"

# What a capable judge model would answer at each stage.
SCRIPT = [
    {"match": "divide the claim", "responses": ["""[
{'sentence': 'Earth is flat', 'reason': 'The evidence explicitly states that Earth is a marble shaped planet, not flat.', 'correction': 'Earth is round.'}, {'sentence': 'Earth is red', 'reason': 'As per the evidence, Earth is blue.', 'correction': 'Earth is blue'}
]"""]},
    {"match": "Links content:", "responses": ["""[
{'error': 'The evidence explicitly states that Earth is a marble shaped planet, not flat.', 'response': 'Yes', 'correction': 'Yes', 'existing_links': 'Yes', 'related_links': 'Yes', 'supporting_links': 'Yes'}, {'error': 'As per the evidence, Earth is blue.', 'response': 'Yes', 'correction': 'Yes', 'existing_links': 'Yes', 'related_links': 'Yes', 'supporting_links': 'Yes'}
]"""]},
    {"match": "List of errors:", "responses": ["""[
{'error': 'The evidence explicitly states that Earth is a marble shaped planet, not flat.', 'response': 'Yes', 'correction': 'Yes', 'supporting_links': 'Yes'}, {'error': 'As per the evidence, Earth is blue.', 'response': 'Yes', 'correction': 'Yes', 'supporting_links': 'Yes'}
]"""]},
]


def main() -> None:
    backend = MockReplayBackend(SCRIPT, model_name="demo-judge")

    print("Stage 1: split the claim into atomic subclaims and find the false ones")
    findings = segment_and_correct(CLAIM, EVIDENCE, backend)
    for finding in findings:
        print(f"  false subclaim: {finding.sentence!r}")
        print(f"    why:        {finding.reason}")
        print(f"    correction: {finding.correction}")

    print("\nStage 2: check the explanation against each error and correction")
    records = evaluate_explanation(findings, EXPLANATION, backend)
    for record in records:
        print(f"  mentioned={record.response} corrected={record.correction} link_support={record.supporting_links}")

    score = score_without_ucr(records)
    print(f"\nWithout retrieved link content: raw {score.raw} -> likert {format_score(score.likert)}")

    print("\nStage 3 variant: judge the links by their retrieved content")
    with tempfile.TemporaryDirectory() as tmp:
        cache_dir = Path(tmp)
        cache_store(cache_dir, FetchResult(
            url=URL, working=True, fetched_at=0.0, status_code=200,
            body="<p>Earth is a round blue planet. NASA photographs show the blue marble from space.</p>",
        ))
        sample = EvalSample(
            id="demo", claim=CLAIM, evidence=EVIDENCE, label=Label.FALSE,
            explanations=(Explanation(ExplanationSource.DATASET, EXPLANATION),),
        )
        policy = FetchPolicy(cache_dir=cache_dir, offline=True, min_host_interval_s=0.0)
        outcome = fingract_score(sample, sample.explanations[0], "with_ucr", backend, fetch_policy=policy)
    print(f"With retrieved link content: likert {format_score(outcome.likert)}")


if __name__ == "__main__":
    main()
