"""Batch evaluation: run an evaluator over a whole dataset and persist scores.

One bad link or unparseable completion must not sink a 200-sample batch, so
every (sample, explanation, run) is isolated: failures are recorded in the
results file and the run continues.  Results files are deterministic given a
warm cache (sorted keys, no timestamps) and carry a configuration hash so
reports can refuse to mix incompatible runs.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import prompts
from .baselines import GEVAL_PARAMS, PROMETHEUS_PARAMS, geval_score, prometheus_score
from .errors import FingractError
from .gateway import ResponseCache
from .model import EvalSample, Explanation, format_score
from .scoring import score_with_ucr, score_without_ucr
from .segmentation import SEGMENTATION_PARAMS, segment_and_correct
from .ucr import FetchPolicy, build_links_content
from .verdicts import JUDGE_PARAMS, evaluate_explanation, evaluate_explanation_with_sources

EVALUATORS = ("fingract", "geval", "prometheus")
MODES = ("plain", "with_ucr")


@dataclass(frozen=True)
class Outcome:
    """Result of scoring one explanation in one run."""

    status: str                    # ok | not_applicable | error
    likert: Fraction | None = None
    error: str | None = None

    def to_obj(self) -> dict:
        obj: dict = {"status": self.status}
        if self.likert is not None:
            obj["likert"] = format_score(self.likert)
            obj["exact"] = f"{self.likert.numerator}/{self.likert.denominator}"
        if self.error is not None:
            obj["error"] = self.error
        return obj

    @staticmethod
    def from_obj(obj: dict) -> "Outcome":
        likert = None
        if "exact" in obj:
            num, den = obj["exact"].split("/")
            likert = Fraction(int(num), int(den))
        return Outcome(status=obj["status"], likert=likert, error=obj.get("error"))


def _params_obj(params) -> dict:
    return {
        "temperature": params.temperature,
        "top_p": params.top_p,
        "n_samples": params.n_samples,
        "fresh_context": params.fresh_context,
    }


def config_hash(evaluator: str, mode: str, model: str) -> str:
    """Fingerprint of everything that shapes a score: evaluator, mode,
    model name, decoding parameters, and the exact prompt bodies."""
    payload = {
        "evaluator": evaluator,
        "mode": mode,
        "model": model,
        "params": {
            "segmentation": _params_obj(SEGMENTATION_PARAMS),
            "judge": _params_obj(JUDGE_PARAMS),
            "geval": _params_obj(GEVAL_PARAMS),
            "prometheus": _params_obj(PROMETHEUS_PARAMS),
        },
        "prompts": {
            t.id: hashlib.sha256(t.body.encode("utf-8")).hexdigest() for t in prompts.ALL_TEMPLATES
        },
    }
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def fingract_score(
    sample: EvalSample,
    explanation: Explanation,
    mode: str,
    backend,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    fetch_policy: FetchPolicy | None = None,
    summary_budget: int = 512,
    run_tag: str = "",
) -> Outcome:
    """Run the three-stage pipeline on one explanation.

    A claim in which segmentation finds no false subclaim yields a
    not-applicable outcome (there is nothing to divide coverage by).
    """
    findings = segment_and_correct(
        sample.claim, sample.evidence, backend, cache=cache, replay_only=replay_only, run_tag=run_tag
    )
    if not findings:
        return Outcome(status="not_applicable")
    if mode == "with_ucr":
        links_content = build_links_content(explanation.urls, policy=fetch_policy, budget=summary_budget)
        records = evaluate_explanation_with_sources(
            findings, explanation.text, links_content, backend,
            cache=cache, replay_only=replay_only, run_tag=run_tag,
        )
        score = score_with_ucr(records)
    elif mode == "plain":
        records = evaluate_explanation(
            findings, explanation.text, backend, cache=cache, replay_only=replay_only, run_tag=run_tag
        )
        score = score_without_ucr(records)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Outcome(status="ok", likert=score.likert)


def _score_once(
    sample: EvalSample,
    explanation: Explanation,
    evaluator: str,
    mode: str,
    backend,
    cache,
    replay_only: bool,
    fetch_policy,
    summary_budget: int,
    run_tag: str,
) -> Outcome:
    if evaluator == "fingract":
        return fingract_score(
            sample, explanation, mode, backend,
            cache=cache, replay_only=replay_only, fetch_policy=fetch_policy,
            summary_budget=summary_budget, run_tag=run_tag,
        )
    links_content = None
    if mode == "with_ucr":
        links_content = build_links_content(explanation.urls, policy=fetch_policy, budget=summary_budget)
    if evaluator == "geval":
        likert = geval_score(
            sample, explanation, mode, backend,
            links_content=links_content, cache=cache, replay_only=replay_only, run_tag=run_tag,
        )
        return Outcome(status="ok", likert=likert)
    if evaluator == "prometheus":
        value, _feedback = prometheus_score(
            sample, explanation, mode, backend,
            links_content=links_content, cache=cache, replay_only=replay_only, run_tag=run_tag,
        )
        return Outcome(status="ok", likert=Fraction(value))
    raise ValueError(f"unknown evaluator {evaluator!r}")


def evaluate_dataset(
    samples: Sequence[EvalSample],
    evaluator: str,
    mode: str,
    backend,
    runs: int = 1,
    jobs: int = 1,
    cache: ResponseCache | None = None,
    replay_only: bool = False,
    fetch_policy: FetchPolicy | None = None,
    summary_budget: int = 512,
) -> dict:
    """Score every explanation of every sample, ``runs`` times each.

    Returns the results document (also what gets written to disk): a config
    header plus one entry per (sample, explanation) with per-run outcomes,
    ordered by sample id then explanation index.
    """
    if evaluator not in EVALUATORS:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")

    tasks = [
        (sample, index, explanation)
        for sample in samples
        for index, explanation in enumerate(sample.explanations)
    ]

    def run_entry(task):
        sample, index, explanation = task
        outcomes = []
        for run in range(runs):
            try:
                outcome = _score_once(
                    sample, explanation, evaluator, mode, backend,
                    cache, replay_only, fetch_policy, summary_budget, run_tag=f"run{run}",
                )
            except FingractError as exc:
                outcome = Outcome(status="error", error=f"{type(exc).__name__}: {exc}")
            outcomes.append(outcome)
        return sample, index, explanation, outcomes

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(run_entry, tasks))
    else:
        entries = [run_entry(t) for t in tasks]

    entries.sort(key=lambda e: (e[0].id, e[1]))
    results = [
        {
            "sample_id": sample.id,
            "explanation_index": index,
            "explanation_source": explanation.source.value,
            "runs": [o.to_obj() for o in outcomes],
        }
        for sample, index, explanation, outcomes in entries
    ]
    return {
        "config": {
            "evaluator": evaluator,
            "mode": mode,
            "model": backend.model_name,
            "runs": runs,
            "config_hash": config_hash(evaluator, mode, backend.model_name),
        },
        "results": results,
    }


def write_results(document: dict, path: str | Path) -> None:
    """Serialize deterministically: sorted keys, stable indentation, no clock."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def read_results(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
