"""Classification and localization metrics for the two objective tasks."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..errors import ValidationError


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_class: dict = field(default_factory=dict, compare=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
        }


@dataclass(frozen=True)
class LocalizationReport:
    mean_precision: float
    mean_recall: float
    mean_f1: float
    mean_jaccard: float
    emr: float
    per_sample: tuple = field(default=(), compare=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "mean_f1": self.mean_f1,
            "mean_jaccard": self.mean_jaccard,
            "emr": self.emr,
        }


def classification_metrics(
    preds: list, golds: list, classes: set | None = None
) -> ClassificationReport:
    """Accuracy plus gold-support-weighted precision/recall/F1.

    Classes with zero gold support or a zero denominator contribute 0 to the
    affected metric rather than being dropped.
    """
    if len(preds) != len(golds):
        raise ValidationError(
            f"prediction/gold length mismatch: {len(preds)} vs {len(golds)}"
        )
    if not golds:
        raise ValidationError("classification_metrics requires at least one sample")
    observed = set(preds) | set(golds)
    if classes is None:
        classes = observed
    else:
        unknown = observed - set(classes)
        if unknown:
            raise ValidationError(f"labels outside the class set: {sorted(unknown)}")

    n = len(golds)
    support = Counter(golds)
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    for pred, gold in zip(preds, golds):
        if pred == gold:
            tp[gold] += 1
        else:
            fp[pred] += 1
            fn[gold] += 1

    per_class = {}
    weighted_p = weighted_r = weighted_f1 = 0.0
    for label in classes:
        p_denom = tp[label] + fp[label]
        r_denom = tp[label] + fn[label]
        precision = tp[label] / p_denom if p_denom else 0.0
        recall = tp[label] / r_denom if r_denom else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if (precision + recall)
            else 0.0
        )
        per_class[label] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support[label],
        }
        weight = support[label] / n
        weighted_p += weight * precision
        weighted_r += weight * recall
        weighted_f1 += weight * f1

    accuracy = sum(p == g for p, g in zip(preds, golds)) / n
    return ClassificationReport(accuracy, weighted_p, weighted_r, weighted_f1, per_class)


def _sample_localization(pred: frozenset, gold: frozenset) -> tuple:
    if not pred and not gold:
        return (1.0, 1.0, 1.0, 1.0, 1.0)
    if not gold:
        return (0.0, 1.0, 0.0, 0.0, 0.0)
    if not pred:
        return (1.0, 0.0, 0.0, 0.0, 0.0)
    inter = len(pred & gold)
    precision = inter / len(pred)
    recall = inter / len(gold)
    f1 = (
        2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    )
    jaccard = inter / len(pred | gold)
    exact = 1.0 if pred == gold else 0.0
    return (precision, recall, f1, jaccard, exact)


def localization_metrics(pred_sets: list, gold_sets: list) -> LocalizationReport:
    """Macro-averaged precision/recall/F1/Jaccard and exact-match ratio.

    Empty-set conventions: both empty scores 1 everywhere; empty gold with a
    non-empty prediction scores recall 1 but everything else 0; empty
    prediction with non-empty gold scores precision 1 but everything else 0.
    """
    if len(pred_sets) != len(gold_sets):
        raise ValidationError(
            f"prediction/gold length mismatch: {len(pred_sets)} vs {len(gold_sets)}"
        )
    if not gold_sets:
        raise ValidationError("localization_metrics requires at least one sample")
    rows = [
        _sample_localization(frozenset(p), frozenset(g))
        for p, g in zip(pred_sets, gold_sets)
    ]
    n = len(rows)
    means = [sum(row[i] for row in rows) / n for i in range(5)]
    return LocalizationReport(*means, per_sample=tuple(rows))
