"""Thematic-fit prompting harness.

Scores ``(predicate, argument, role)`` tuples with chat-completion models
across a 2x2x2 grid of prompting configurations and evaluates the scores
against human typicality norms via Spearman rank correlation.
"""

from .codec import (
    FitCategory,
    ScoreOutcome,
    ScoreParseError,
    ScoreSource,
    average,
    category_value,
    extract_json,
    parse_categorical,
    parse_numeric,
)
from .context import CandidateSentence, ContextSet, build_context, generate_sentences, verify_coherence
from .gateway import (
    Gateway,
    GatewayError,
    HttpBackend,
    Message,
    MockBackend,
    ModelParams,
    ModelResponse,
    cache_key,
)
from .mocking import NormEchoBackend
from .norms import (
    ColumnSpec,
    Dataset,
    NormItem,
    RatingScale,
    Role,
    dedupe,
    load_dataset,
    normalize_rating,
    preprocess,
    strip_indefinite_articles,
)
from .prompts import (
    ExperimentConfig,
    InputForm,
    OutputForm,
    PromptChain,
    ReasoningForm,
    output_instruction,
    render_simple_chain,
    render_step_chain,
    role_display,
)
from .runner import (
    AnalyzeResult,
    GridResult,
    RunAbortedError,
    RunManifest,
    SweepResult,
    analyze_run,
    run_experiment,
    run_grid,
    sweep_grid,
)
from .stats import (
    CorrelationResult,
    FitJudgment,
    FitLabel,
    classify_fit,
    correlate_experiment,
    exact_p_value,
    p_value,
    spearman,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyzeResult",
    "CandidateSentence",
    "ColumnSpec",
    "ContextSet",
    "CorrelationResult",
    "Dataset",
    "ExperimentConfig",
    "FitCategory",
    "FitJudgment",
    "FitLabel",
    "Gateway",
    "GatewayError",
    "GridResult",
    "HttpBackend",
    "InputForm",
    "Message",
    "MockBackend",
    "ModelParams",
    "ModelResponse",
    "NormEchoBackend",
    "NormItem",
    "OutputForm",
    "PromptChain",
    "RatingScale",
    "ReasoningForm",
    "Role",
    "RunAbortedError",
    "RunManifest",
    "ScoreOutcome",
    "ScoreParseError",
    "ScoreSource",
    "SweepResult",
    "analyze_run",
    "average",
    "build_context",
    "cache_key",
    "category_value",
    "classify_fit",
    "correlate_experiment",
    "dedupe",
    "exact_p_value",
    "extract_json",
    "generate_sentences",
    "load_dataset",
    "normalize_rating",
    "output_instruction",
    "p_value",
    "parse_categorical",
    "parse_numeric",
    "preprocess",
    "render_simple_chain",
    "render_step_chain",
    "role_display",
    "run_experiment",
    "run_grid",
    "spearman",
    "strip_indefinite_articles",
    "sweep_grid",
    "verify_coherence",
]
