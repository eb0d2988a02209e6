"""Zero-shot empathy classification over labeled (post, response) examples."""

from __future__ import annotations

from ..agents import load_template
from ..backends import ChatBackend, ChatBackendSpec, build_backend, chat
from ..errors import ValidationError
from .metrics import classification_metrics

SENTINEL_LABEL = "__unparsed__"

_SYSTEM = "You assess empathy in responses to mental-health support posts."


def _coerce_example(example) -> tuple[str, str, str]:
    if isinstance(example, dict):
        return (str(example["post"]), str(example["response"]), str(example["label"]))
    post, response, label = example
    return (str(post), str(response), str(label))


def empathy_eval(
    backend: ChatBackendSpec | ChatBackend, examples: list
) -> dict[str, float]:
    """One zero-shot call per example; the parsed label is scored against gold.

    An answer matching no gold label becomes a sentinel wrong-class
    prediction, so parse failures count against the model.
    """
    if not examples:
        raise ValidationError("empathy_eval requires at least one example")
    rows = [_coerce_example(e) for e in examples]
    built = build_backend(backend) if isinstance(backend, ChatBackendSpec) else backend
    labels = sorted({label for _, _, label in rows})
    by_folded = {label.casefold(): label for label in labels}
    labels_text = ", ".join(labels)
    preds: list[str] = []
    golds: list[str] = []
    for post, response, gold in rows:
        prompt = load_template("empathy").format(
            post=post, response=response, labels=labels_text
        )
        raw = chat(built, _SYSTEM, [{"role": "user", "content": prompt}], role="empathy")
        lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
        answer = lines[0].strip().strip('"').casefold() if lines else ""
        preds.append(by_folded.get(answer, SENTINEL_LABEL))
        golds.append(gold)
    classes = set(golds) | set(preds)
    return classification_metrics(preds, golds, classes).as_dict()
