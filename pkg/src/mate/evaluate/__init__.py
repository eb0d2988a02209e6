"""Evaluation harness: objective tasks, text overlap, judge, empathy, bootstrap."""

from .bootstrap import BootstrapResult, paired_bootstrap_ci
from .empathy import SENTINEL_LABEL, empathy_eval
from .inference import (
    ObjectiveReport,
    PredictedFeedback,
    SENTINEL_CATEGORY,
    evaluate_objective,
    run_supervision_inference,
)
from .judge import (
    JUDGE_CRITERIA,
    JudgeRunReport,
    JudgeVerdict,
    aggregate_judge,
    agreement_report,
    judge_pairwise,
    judge_run,
)
from .metrics import (
    ClassificationReport,
    LocalizationReport,
    classification_metrics,
    localization_metrics,
)
from .textoverlap import bleu4, rouge, tokenize

__all__ = [
    "BootstrapResult",
    "ClassificationReport",
    "JUDGE_CRITERIA",
    "JudgeRunReport",
    "JudgeVerdict",
    "LocalizationReport",
    "ObjectiveReport",
    "PredictedFeedback",
    "SENTINEL_CATEGORY",
    "SENTINEL_LABEL",
    "aggregate_judge",
    "agreement_report",
    "bleu4",
    "classification_metrics",
    "empathy_eval",
    "evaluate_objective",
    "judge_pairwise",
    "judge_run",
    "localization_metrics",
    "paired_bootstrap_ci",
    "rouge",
    "run_supervision_inference",
    "tokenize",
]
