import pytest

from conftest import scripted_spec
from mate.errors import ValidationError
from mate.evaluate import empathy_eval

EXAMPLES = [
    {"post": "I cannot sleep lately.", "response": "That sounds draining.", "label": "strong"},
    {"post": "Lost my job.", "response": "Just apply elsewhere.", "label": "weak"},
    {"post": "Everything feels heavy.", "response": "I hear how heavy it is.", "label": "strong"},
    {"post": "Nobody calls me.", "response": "Ok.", "label": "weak"},
]


def _spec(answers):
    return scripted_spec({"empathy": list(answers)})


def test_echo_gold_scores_perfectly():
    spec = _spec([e["label"] for e in EXAMPLES])
    report = empathy_eval(spec, EXAMPLES)
    assert report["accuracy"] == 1.0
    assert report["weighted_f1"] == 1.0


def test_constant_label_on_balanced_set():
    spec = _spec(["strong"] * 4)
    report = empathy_eval(spec, EXAMPLES)
    assert report["accuracy"] == 0.5
    # strong: precision 0.5 recall 1; weak: 0/0 -> 0; weights are half each.
    assert report["weighted_precision"] == pytest.approx(0.25)
    assert report["weighted_recall"] == pytest.approx(0.5)


def test_label_match_is_case_insensitive_and_first_line_only():
    spec = _spec(["STRONG\nextra chatter", '"weak"', "Strong", "weak"])
    report = empathy_eval(spec, EXAMPLES)
    assert report["accuracy"] == 1.0


def test_garbage_answer_counts_against_the_model():
    spec = _spec(["strong", "no idea", "strong", "weak"])
    report = empathy_eval(spec, EXAMPLES)
    assert report["accuracy"] == 0.75


def test_tuple_examples_accepted():
    rows = [(e["post"], e["response"], e["label"]) for e in EXAMPLES]
    spec = _spec([e["label"] for e in EXAMPLES])
    assert empathy_eval(spec, rows)["accuracy"] == 1.0


def test_empty_examples_rejected():
    with pytest.raises(ValidationError):
        empathy_eval(_spec([]), [])


def test_one_call_per_example():
    from mate.backends import build_backend

    backend = build_backend(_spec(["strong"] * 4))
    empathy_eval(backend, EXAMPLES)
    assert backend.calls_for("empathy") == 4
