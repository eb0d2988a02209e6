import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from mate.errors import ValidationError
from mate.evaluate import classification_metrics, localization_metrics


def brute_force_classification(preds, golds, classes):
    """Independent reimplementation used as the oracle."""
    n = len(golds)
    accuracy = sum(p == g for p, g in zip(preds, golds)) / n
    support = Counter(golds)
    weighted = {"p": 0.0, "r": 0.0, "f": 0.0}
    for label in classes:
        tp = sum(1 for p, g in zip(preds, golds) if p == g == label)
        pred_count = sum(1 for p in preds if p == label)
        gold_count = support[label]
        precision = tp / pred_count if pred_count else 0.0
        recall = tp / gold_count if gold_count else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        weight = gold_count / n
        weighted["p"] += weight * precision
        weighted["r"] += weight * recall
        weighted["f"] += weight * f1
    return accuracy, weighted["p"], weighted["r"], weighted["f"]


def test_classification_documented_fixture():
    report = classification_metrics([0, 1, 1, 2], [0, 0, 1, 2])
    assert report.accuracy == pytest.approx(0.75, abs=1e-9)
    assert report.weighted_precision == pytest.approx(0.875, abs=1e-9)
    assert report.weighted_recall == pytest.approx(0.75, abs=1e-9)
    assert report.weighted_f1 == pytest.approx(0.75, abs=1e-9)


def test_classification_perfect_and_worst():
    perfect = classification_metrics(["a", "b"], ["a", "b"])
    assert perfect.accuracy == 1.0
    assert perfect.weighted_f1 == 1.0
    wrong = classification_metrics(["b", "a"], ["a", "b"])
    assert wrong.accuracy == 0.0
    assert wrong.weighted_f1 == 0.0


def test_classification_errors():
    with pytest.raises(ValidationError):
        classification_metrics([1], [1, 2])
    with pytest.raises(ValidationError):
        classification_metrics([], [])
    with pytest.raises(ValidationError, match="outside"):
        classification_metrics([1, 9], [1, 2], classes={1, 2})


def test_classification_explicit_class_set_adds_zero_support_classes():
    # An extra class with zero support contributes weight 0; metrics match
    # the implicit-class run.
    implicit = classification_metrics([0, 1], [0, 1])
    explicit = classification_metrics([0, 1], [0, 1], classes={0, 1, 2})
    assert implicit.as_dict() == explicit.as_dict()
    assert explicit.per_class[2]["support"] == 0


def test_classification_200_randomized_fixtures_match_brute_force():
    rng = random.Random(20260814)
    for _ in range(200):
        n_classes = rng.randint(1, 6)
        n = rng.randint(1, 8)
        golds = [rng.randrange(n_classes) for _ in range(n)]
        preds = [rng.randrange(n_classes) for _ in range(n)]
        classes = set(range(n_classes))
        report = classification_metrics(preds, golds, classes)
        acc, p, r, f = brute_force_classification(preds, golds, classes)
        assert report.accuracy == pytest.approx(acc, abs=1e-12)
        assert report.weighted_precision == pytest.approx(p, abs=1e-12)
        assert report.weighted_recall == pytest.approx(r, abs=1e-12)
        assert report.weighted_f1 == pytest.approx(f, abs=1e-12)


@settings(max_examples=60)
@given(
    rows=st.lists(
        st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=12
    )
)
def test_classification_bounds_property(rows):
    preds = [r[0] for r in rows]
    golds = [r[1] for r in rows]
    report = classification_metrics(preds, golds)
    for value in report.as_dict().values():
        assert 0.0 <= value <= 1.0 + 1e-12


def test_localization_documented_fixture():
    report = localization_metrics([{2, 3, 4, 5}], [{2, 4}])
    assert report.mean_precision == pytest.approx(0.5, abs=1e-9)
    assert report.mean_recall == pytest.approx(1.0, abs=1e-9)
    assert report.mean_jaccard == pytest.approx(0.5, abs=1e-9)
    assert report.emr == 0.0
    assert report.mean_f1 == pytest.approx(2 / 3, abs=1e-9)


def test_localization_empty_set_conventions():
    both = localization_metrics([set()], [set()])
    assert both.as_dict() == {
        "mean_precision": 1.0,
        "mean_recall": 1.0,
        "mean_f1": 1.0,
        "mean_jaccard": 1.0,
        "emr": 1.0,
    }
    gold_empty = localization_metrics([{1}], [set()])
    assert gold_empty.mean_recall == 1.0
    assert gold_empty.mean_precision == 0.0
    assert gold_empty.emr == 0.0
    pred_empty = localization_metrics([set()], [{1}])
    assert pred_empty.mean_precision == 1.0
    assert pred_empty.mean_recall == 0.0
    assert pred_empty.mean_f1 == 0.0


def test_localization_macro_averages_per_sample():
    report = localization_metrics([{1}, {1, 3}], [{1}, {1}])
    assert report.mean_precision == pytest.approx((1.0 + 0.5) / 2)
    assert report.mean_recall == 1.0
    assert report.emr == 0.5


def test_localization_errors():
    with pytest.raises(ValidationError):
        localization_metrics([{1}], [])
    with pytest.raises(ValidationError):
        localization_metrics([], [])


@settings(max_examples=60)
@given(
    samples=st.lists(
        st.tuples(
            st.frozensets(st.integers(1, 9), max_size=5),
            st.frozensets(st.integers(1, 9), max_size=5),
        ),
        min_size=1,
        max_size=10,
    )
)
def test_localization_brute_force_property(samples):
    preds = [s[0] for s in samples]
    golds = [s[1] for s in samples]
    report = localization_metrics(preds, golds)

    def one(pred, gold):
        if not pred and not gold:
            return 1.0, 1.0, 1.0, 1.0, 1.0
        if not gold:
            return 0.0, 1.0, 0.0, 0.0, 0.0
        if not pred:
            return 1.0, 0.0, 0.0, 0.0, 0.0
        inter = len(pred & gold)
        p = inter / len(pred)
        r = inter / len(gold)
        f = 2 * p * r / (p + r) if p + r else 0.0
        return p, r, f, inter / len(pred | gold), float(pred == gold)

    rows = [one(p, g) for p, g in samples]
    n = len(rows)
    assert report.mean_precision == pytest.approx(sum(r[0] for r in rows) / n)
    assert report.mean_recall == pytest.approx(sum(r[1] for r in rows) / n)
    assert report.mean_f1 == pytest.approx(sum(r[2] for r in rows) / n)
    assert report.mean_jaccard == pytest.approx(sum(r[3] for r in rows) / n)
    assert report.emr == pytest.approx(sum(r[4] for r in rows) / n)
