"""Command-line entry point: evaluate a dataset, report against humans,
or pre-fetch link content.

Exit codes: 0 on success, 1 on a run error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

from .dataset import human_mean, load_dataset
from .errors import FingractError
from .gateway import MockReplayBackend, RemoteBackend, ResponseCache
from .metaeval import MetaEvalReport, build_report, krippendorff_alpha
from .runner import EVALUATORS, MODES, Outcome, evaluate_dataset, read_results, write_results
from .ucr import FetchPolicy, fetch_all


def _build_backend(args) -> object:
    if args.backend == "mock":
        script: object = "OK"
        if args.script:
            script = json.loads(Path(args.script).read_text(encoding="utf-8"))
        return MockReplayBackend(script, model_name=args.model)
    return RemoteBackend(args.backend, args.model)


def _fetch_policy(args, offline: bool) -> FetchPolicy:
    return FetchPolicy(
        timeout_s=args.timeout,
        cache_dir=Path(args.ucr_cache) if args.ucr_cache else None,
        offline=offline,
        min_host_interval_s=args.host_interval,
    )


def _cmd_evaluate(args) -> int:
    samples = load_dataset(args.dataset)
    backend = _build_backend(args)
    cache = ResponseCache(Path(args.cache_dir)) if args.cache_dir else None
    if args.replay and cache is None:
        raise FingractError("--replay needs --cache-dir pointing at a warm cache")
    policy = _fetch_policy(args, offline=args.replay)
    document = evaluate_dataset(
        samples,
        args.evaluator,
        args.mode,
        backend,
        runs=args.runs,
        jobs=args.jobs,
        cache=cache,
        replay_only=args.replay,
        fetch_policy=policy,
        summary_budget=args.budget,
    )
    write_results(document, args.out)
    scored = sum(
        1 for entry in document["results"] if all(r["status"] == "ok" for r in entry["runs"])
    )
    print(f"wrote {args.out}: {len(document['results'])} explanations, {scored} fully scored")
    return 0


def _entry_runs(entry: dict) -> list[Fraction | None]:
    outcomes = [Outcome.from_obj(o) for o in entry["runs"]]
    return [o.likert if o.status == "ok" else None for o in outcomes]


def _report_for_file(path: str, samples_by_id: dict) -> MetaEvalReport:
    document = read_results(path)
    config = document["config"]
    entries = document["results"]
    unknown = [e["sample_id"] for e in entries if e["sample_id"] not in samples_by_id]
    if unknown:
        raise FingractError(f"{path}: results reference unknown sample ids {sorted(set(unknown))[:5]}")
    runs = config["runs"]
    per_run: list[list[Fraction | None]] = [[] for _ in range(runs)]
    humans: list[Fraction | None] = []
    for entry in entries:
        run_scores = _entry_runs(entry)
        for run_index in range(runs):
            per_run[run_index].append(run_scores[run_index])
        humans.append(human_mean(samples_by_id[entry["sample_id"]]))
    return build_report(config["evaluator"], config["mode"], per_run, humans)


def _correlation_table(reports: list[MetaEvalReport]) -> str:
    lines = ["Correlation with human scores (per evaluator and mode)"]
    header = f"{'evaluator':<12} {'mode':<9} {'Pearson':>8} {'p':>8} {'Kendall':>8} {'p':>8} {'n':>5}"
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        lines.append(
            f"{rep.evaluator:<12} {rep.mode:<9} {rep.pearson_r:>8.3f} {rep.pearson_p:>8.3f} "
            f"{rep.kendall_tau:>8.3f} {rep.kendall_p:>8.3f} {rep.n_samples:>5}"
        )
    return "\n".join(lines)


def _bias_table(reports: list[MetaEvalReport]) -> str:
    lines = ["Bias counts (evaluator vs human, 2-point rule on raw run means)"]
    header = (
        f"{'evaluator':<12} {'mode':<9} {'over':>5} {'under':>6} {'in_tol':>7} {'n/a':>5} "
        f"{'over(rnd)':>10} {'under(rnd)':>11}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        lines.append(
            f"{rep.evaluator:<12} {rep.mode:<9} {rep.overestimates:>5} {rep.underestimates:>6} "
            f"{rep.in_tolerance:>7} {rep.excluded_na:>5} {rep.rounded_overestimates:>10} "
            f"{rep.rounded_underestimates:>11}"
        )
        per_run = ", ".join(str(b.overestimates) for b in rep.per_run)
        if per_run:
            lines.append(f"{'':<12} per-run overestimates: {per_run}")
    return "\n".join(lines)


def _cmd_report(args) -> int:
    samples = load_dataset(args.dataset)
    samples_by_id = {s.id: s for s in samples}

    seen_hashes: dict[tuple[str, str], str] = {}
    for path in args.results:
        config = read_results(path)["config"]
        key = (config["evaluator"], config["mode"])
        if key in seen_hashes and seen_hashes[key] != config["config_hash"]:
            raise FingractError(
                f"{path}: config hash differs from an earlier {key[0]}/{key[1]} results file; refusing to mix runs"
            )
        seen_hashes[key] = config["config_hash"]
    reports = [_report_for_file(path, samples_by_id) for path in args.results]

    raw_matrix = _annotator_matrix(samples)
    alpha = None
    if raw_matrix:
        matrix = [[float(v) if v is not None else None for v in row] for row in raw_matrix]
        try:
            alpha = krippendorff_alpha(matrix)
        except FingractError:
            alpha = None

    text = _correlation_table(reports) + "\n\n" + _bias_table(reports)
    if alpha is not None:
        text += f"\n\nKrippendorff alpha (human annotators, interval): {alpha:.3f}"
    print(text)
    if args.out:
        payload = {"reports": [dataclasses.asdict(rep) for rep in reports], "krippendorff_alpha": alpha}
        Path(f"{args.out}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        Path(f"{args.out}.txt").write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}.json and {args.out}.txt")
    return 0


def _annotator_matrix(samples) -> list[list]:
    """Annotator-major matrix of normalized scores (None where missing)."""
    from .dataset import normalize_human_scores

    annotators = sorted({a.annotator_id for s in samples for a in s.human_scores})
    if not annotators:
        return []
    matrix = []
    for annotator in annotators:
        row = []
        for sample in samples:
            value = None
            for annotation in sample.human_scores:
                if annotation.annotator_id == annotator:
                    value = normalize_human_scores(annotation)
                    break
            row.append(value)
        matrix.append(row)
    return matrix


def _cmd_fetch(args) -> int:
    samples = load_dataset(args.dataset)
    urls: list[str] = []
    seen: set[str] = set()
    for sample in samples:
        for explanation in sample.explanations:
            for url in explanation.urls:
                if url not in seen:
                    seen.add(url)
                    urls.append(url)
    if not urls:
        print("0 links found in the dataset")
        return 0
    policy = _fetch_policy(args, offline=False)
    if policy.cache_dir is None:
        raise FingractError("fetch needs --ucr-cache to store retrieved pages")
    results = fetch_all(urls, policy)
    working = sum(1 for r in results if r.working)
    print(f"fetched {len(results)} links: {working} working, {len(results) - working} not working")
    return 0


def _add_fetch_flags(parser) -> None:
    parser.add_argument("--ucr-cache", help="directory for the on-disk page cache")
    parser.add_argument("--timeout", type=float, default=10.0, help="per-request timeout in seconds")
    parser.add_argument(
        "--host-interval", type=float, default=1.0,
        help="minimum seconds between requests to the same host",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fingract", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="score every explanation in a dataset")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--evaluator", required=True, choices=EVALUATORS)
    p_eval.add_argument("--mode", default="plain", choices=MODES)
    p_eval.add_argument("--runs", type=int, default=1)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--backend", default="mock", help='endpoint URL, or "mock" for a scripted backend')
    p_eval.add_argument("--model", default="mock", help="model name sent to the backend and hashed into the cache key")
    p_eval.add_argument("--script", help="JSON script for the mock backend")
    p_eval.add_argument("--cache-dir", help="completion cache directory")
    p_eval.add_argument("--replay", action="store_true", help="serve everything from the cache; no network")
    p_eval.add_argument("--budget", type=int, default=512, help="summary token budget per link")
    p_eval.add_argument("--out", required=True, help="results file to write")
    _add_fetch_flags(p_eval)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_report = sub.add_parser("report", help="correlation and bias tables for results files")
    p_report.add_argument("results", nargs="+", help="results files from the evaluate command")
    p_report.add_argument("--dataset", required=True, help="dataset holding the human annotations")
    p_report.add_argument("--out", help="prefix for machine-readable and text reports")
    p_report.set_defaults(func=_cmd_report)

    p_fetch = sub.add_parser("fetch", help="warm the link-content cache for a dataset")
    p_fetch.add_argument("--dataset", required=True)
    _add_fetch_flags(p_fetch)
    p_fetch.set_defaults(func=_cmd_fetch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FingractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
