"""Fine-grained actionability evaluation for fact-checking explanations."""

from .baselines import geval_score, prometheus_score
from .dataset import (
    generate_explanation,
    generate_supporting_link,
    human_mean,
    load_dataset,
    normalize_human_scores,
    save_dataset,
)
from .gateway import (
    DecodingParams,
    MockReplayBackend,
    PromptTemplate,
    RemoteBackend,
    ResponseCache,
    complete,
    extract_structured_list,
    render,
)
from .metaeval import (
    BiasReport,
    MetaEvalReport,
    average_runs,
    bias_report,
    build_report,
    kendall_tau,
    krippendorff_alpha,
    pearson,
)
from .model import (
    ActionabilityCategory,
    ActionabilityScore,
    EvalSample,
    Explanation,
    ExplanationSource,
    HumanAnnotation,
    Label,
    SubclaimFinding,
    VerdictRecord,
    format_score,
    validate_sample,
)
from .runner import evaluate_dataset, fingract_score, write_results
from .scoring import categorize, score_with_ucr, score_without_ucr, to_likert
from .segmentation import segment_and_correct
from .ucr import (
    FetchPolicy,
    FetchResult,
    build_links_content,
    extract_urls,
    fetch,
    fetch_all,
    strip_html,
    summarize,
)
from .verdicts import enforce_sanity, evaluate_explanation, evaluate_explanation_with_sources

__version__ = "0.1.0"
