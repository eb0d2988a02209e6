"""Deployed-path supervision: locate, classify, then write feedback.

Unlike synthesis-time supervision, nothing here knows which behavior was
injected; the three stages recover it from the transcript alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..agents import NO_QUOTES, _strip_wrapping_quotes, load_template, resolve_quote
from ..backends import ChatBackend, ChatBackendSpec, build_backend, chat
from ..errors import ParseError
from ..guideline import Guideline
from ..records import DataPair, DialogueRecord
from .metrics import (
    ClassificationReport,
    LocalizationReport,
    classification_metrics,
    localization_metrics,
)

SENTINEL_CATEGORY = 0

_SYSTEM = "You are a clinical supervisor reviewing counseling practice."


@dataclass(frozen=True)
class PredictedFeedback:
    problematic_turns: frozenset[int]
    category_id: int
    feedback_text: str
    raw: str


@dataclass(frozen=True)
class ObjectiveReport:
    task1: ClassificationReport
    task2: LocalizationReport
    n_samples: int

    def as_dict(self) -> dict:
        return {"task1": self.task1.as_dict(), "task2": self.task2.as_dict()}


def _clean_lines(raw: str) -> list[str]:
    return [
        ln.strip()
        for ln in raw.splitlines()
        if ln.strip() and not ln.strip().startswith("(")
    ]


def _located_turns(
    quote_lines: list[str], dialogue: DialogueRecord
) -> tuple[frozenset[int], tuple[str, ...]]:
    """Resolve located quotes; unmatched fragments become unique negative
    sentinels so they count against precision without intersecting gold."""
    if len(quote_lines) == 1 and quote_lines[0].strip().upper() == NO_QUOTES:
        return frozenset(), ()
    turns: set[int] = set()
    quotes: list[str] = []
    sentinel = 0
    for line in quote_lines:
        quote = _strip_wrapping_quotes(line)
        quotes.append(quote)
        try:
            turns.update(resolve_quote(quote, dialogue))
        except ParseError:
            sentinel -= 1
            turns.add(sentinel)
    return frozenset(turns), tuple(quotes)


def run_supervision_inference(
    backend: ChatBackendSpec | ChatBackend,
    dialogue: DialogueRecord,
    g: Guideline,
    max_retries: int = 2,
) -> PredictedFeedback:
    """Three sequential prompts: locate, classify, feedback.

    Each stage re-asks on unparseable output; after the retry budget the stage
    degrades to its parse-failure value (empty set, sentinel category, empty
    text) and later stages still run. Backend hard failures propagate.
    """
    built = build_backend(backend) if isinstance(backend, ChatBackendSpec) else backend
    transcript = dialogue.transcript()
    raws: list[str] = []

    locate_prompt = load_template("locate").format(transcript=transcript)
    turns: frozenset[int] = frozenset()
    quotes: tuple[str, ...] = ()
    for _ in range(max_retries + 1):
        raw = chat(built, _SYSTEM, [{"role": "user", "content": locate_prompt}], role="locate")
        raws.append(f"[locate]\n{raw}")
        lines = _clean_lines(raw)
        if lines:
            turns, quotes = _located_turns(lines, dialogue)
            break

    quotes_text = "\n".join(f'"{q}"' for q in quotes) if quotes else NO_QUOTES
    classify_prompt = load_template("classify").format(
        guideline_digest=g.digest(), transcript=transcript, quotes=quotes_text
    )
    category_id = SENTINEL_CATEGORY
    for _ in range(max_retries + 1):
        raw = chat(built, _SYSTEM, [{"role": "user", "content": classify_prompt}], role="classify")
        raws.append(f"[classify]\n{raw}")
        lines = _clean_lines(raw)
        if not lines:
            continue
        name = lines[0]
        if name.upper().startswith("CATEGORY:"):
            name = name[len("CATEGORY:") :].strip()
        name = _strip_wrapping_quotes(name)
        try:
            category_id = g.by_category_name(name).id
            break
        except Exception:
            continue

    category_label = (
        g.get(category_id).category_name
        if category_id != SENTINEL_CATEGORY
        else "Unknown"
    )
    feedback_prompt = load_template("feedback").format(
        transcript=transcript, quotes=quotes_text, category=category_label
    )
    feedback_text = ""
    for _ in range(max_retries + 1):
        raw = chat(built, _SYSTEM, [{"role": "user", "content": feedback_prompt}], role="feedback")
        raws.append(f"[feedback]\n{raw}")
        if raw.strip():
            feedback_text = raw.strip()
            break

    return PredictedFeedback(
        problematic_turns=turns,
        category_id=category_id,
        feedback_text=feedback_text,
        raw="\n\n".join(raws),
    )


def evaluate_objective(
    pairs: list[DataPair],
    backend: ChatBackendSpec,
    g: Guideline,
    max_retries: int = 2,
) -> ObjectiveReport:
    """Run inference over gold records and score both objective tasks.

    Scripted backends are rebuilt per record so every dialogue replays the
    same script regardless of batch composition.
    """
    shared = None if backend.kind == "scripted" else build_backend(backend)
    pred_categories: list[int] = []
    gold_categories: list[int] = []
    pred_sets: list[frozenset[int]] = []
    gold_sets: list[frozenset[int]] = []
    for pair in pairs:
        built = shared if shared is not None else build_backend(backend)
        pred = run_supervision_inference(built, pair.dialogue, g, max_retries=max_retries)
        pred_categories.append(pred.category_id)
        gold_categories.append(pair.feedback.category_id)
        pred_sets.append(pred.problematic_turns)
        gold_sets.append(pair.feedback.problematic_turns)
    classes = set(pred_categories) | set(gold_categories)
    return ObjectiveReport(
        task1=classification_metrics(pred_categories, gold_categories, classes),
        task2=localization_metrics(pred_sets, gold_sets),
        n_samples=len(pairs),
    )
