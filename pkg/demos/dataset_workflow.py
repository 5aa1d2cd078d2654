"""Dataset plumbing: write and load the JSONL format, normalize human
rubric scores, and run the generation flows with a scripted backend.

    python demos/dataset_workflow.py
"""

import tempfile
from pathlib import Path

from fingract.dataset import (
    category_counts,
    generate_explanation,
    generate_supporting_link,
    human_mean,
    load_dataset,
    normalize_human_scores,
    save_dataset,
    select_for_link_augmentation,
)
from fingract.gateway import MockReplayBackend
from fingract.model import (
    ActionabilityCategory,
    EvalSample,
    Explanation,
    ExplanationSource,
    HumanAnnotation,
    Label,
)


def main() -> None:
    sample = EvalSample(
        id="bridge-01",
        claim="The bridge opened in 1990 and is the longest in the country.",
        evidence="The bridge opened in 1992; it is the second-longest in the country.",
        label=Label.PARTIALLY_TRUE,
        category=ActionabilityCategory.PARTIAL_NO_SOURCES,
        explanations=(Explanation(ExplanationSource.DATASET, "It opened in 1992 and ranks second."),),
        human_scores=(
            HumanAnnotation("a1", detection=2, correction=2, references=0),
            HumanAnnotation("a2", detection=2, correction=1, references=0),
            HumanAnnotation("a3", detection=1, correction=2, references=0),
        ),
    )

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "demo.jsonl"
        save_dataset([sample], path)
        print(f"wrote {path.name}:")
        print(f"  {path.read_text().strip()}")
        [loaded] = load_dataset(path)
        print(f"round trip equal: {loaded == sample}")

    print("\nRubric normalization (detection+correction+references scaled onto 0..5):")
    for annotation in sample.human_scores:
        value = normalize_human_scores(annotation)
        print(f"  {annotation.annotator_id}: ({annotation.detection},{annotation.correction},"
              f"{annotation.references}) -> {float(value):.3f}")
    print(f"  mean: {float(human_mean(sample)):.3f}")
    print(f"category counts: {category_counts([sample])}")

    print("\nGeneration flows against a scripted model:")
    writer = MockReplayBackend([
        ("actionable explanation", "The year 1990 is wrong; the bridge opened in 1992. It is also only the second-longest."),
        ("web link", "A good source is https://bridges.example.org/opening-1992 for the record."),
    ], model_name="demo-writer")
    generated = generate_explanation(sample.claim, sample.evidence, sample.label, writer)
    print(f"  generated ({generated.model}): {generated.text}")
    link = generate_supporting_link(generated.text, writer)
    print(f"  supporting link: {link}")

    ids = [f"s{i}" for i in range(10)]
    chosen = select_for_link_augmentation(ids, fraction=0.5, seed=42)
    print(f"\nseeded half of {len(ids)} samples chosen for link augmentation: {chosen}")


if __name__ == "__main__":
    main()
