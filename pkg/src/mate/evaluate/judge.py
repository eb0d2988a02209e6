"""Pairwise feedback comparison by an LLM judge, with order de-biasing."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from ..agents import load_template
from ..backends import ChatBackend, ChatBackendSpec, build_backend, chat
from ..datastore import cohen_kappa
from ..errors import BackendError, ValidationError
from ..guideline import Guideline
from ..records import DataPair, DialogueRecord
from ..util import stable_seed
from .inference import run_supervision_inference

JUDGE_CRITERIA = (
    "Objectivity & Fairness",
    "Constructiveness & Actionability",
    "Professional Depth",
    "Comprehensiveness",
    "Clarity & Structure",
)

_SYSTEM = "You compare two pieces of clinical supervision feedback."
_WINNER_RE = re.compile(r"WINNER:\s*(A|B|TIE)\b", re.IGNORECASE)
_RATIONALE_RE = re.compile(r"RATIONALE:\s*(.*)", re.IGNORECASE | re.DOTALL)


@dataclass(frozen=True)
class JudgeVerdict:
    criterion: str
    winner: str  # "a", "b", or "tie", in the caller's labeling
    presentation_order: str  # "ab" or "ba"
    rationale: str


def judge_pairwise(
    dialogue: DialogueRecord | str,
    feedback_a: str,
    feedback_b: str,
    judge: ChatBackendSpec | ChatBackend,
    seed: int,
    criteria: tuple[str, ...] = JUDGE_CRITERIA,
) -> list[JudgeVerdict]:
    """One verdict per criterion; presentation order is drawn per call from
    the seed and the winner is mapped back through it. An unparseable verdict
    is re-asked twice, then recorded as a tie."""
    built = build_backend(judge) if isinstance(judge, ChatBackendSpec) else judge
    transcript = (
        dialogue.transcript() if isinstance(dialogue, DialogueRecord) else dialogue
    )
    verdicts: list[JudgeVerdict] = []
    for criterion in criteria:
        rng = random.Random(stable_seed(seed, criterion))
        order = "ab" if rng.random() < 0.5 else "ba"
        first, second = (
            (feedback_a, feedback_b) if order == "ab" else (feedback_b, feedback_a)
        )
        prompt = load_template("judge").format(
            criterion=criterion,
            transcript=transcript,
            feedback_a=first,
            feedback_b=second,
        )
        winner = None
        rationale = ""
        for _ in range(3):
            raw = chat(built, _SYSTEM, [{"role": "user", "content": prompt}], role="judge")
            match = _WINNER_RE.search(raw)
            if not match:
                continue
            token = match.group(1).upper()
            if token == "TIE":
                winner = "tie"
            elif token == "A":
                winner = "a" if order == "ab" else "b"
            else:
                winner = "b" if order == "ab" else "a"
            found = _RATIONALE_RE.search(raw)
            rationale = found.group(1).strip() if found else ""
            break
        if winner is None:
            winner, rationale = "tie", "unparseable verdict"
        verdicts.append(JudgeVerdict(criterion, winner, order, rationale))
    return verdicts


def aggregate_judge(
    verdicts: list[JudgeVerdict], criteria: tuple[str, ...] = JUDGE_CRITERIA
) -> dict[str, dict[str, float]]:
    """Win/loss/tie rates per criterion, from candidate a's perspective."""
    names = list(criteria)
    for verdict in verdicts:
        if verdict.criterion not in names:
            names.append(verdict.criterion)
    out: dict[str, dict[str, float]] = {}
    for criterion in names:
        rows = [v for v in verdicts if v.criterion == criterion]
        n = len(rows)
        if n == 0:
            out[criterion] = {"win": 0.0, "loss": 0.0, "tie": 0.0}
            continue
        out[criterion] = {
            "win": sum(v.winner == "a" for v in rows) / n,
            "loss": sum(v.winner == "b" for v in rows) / n,
            "tie": sum(v.winner == "tie" for v in rows) / n,
        }
    return out


def agreement_report(judge_choices: list, human_choices: list) -> dict[str, float]:
    """Raw agreement fraction plus chance-corrected kappa."""
    if len(judge_choices) != len(human_choices):
        raise ValidationError(
            f"choice lists differ in length: {len(judge_choices)} vs {len(human_choices)}"
        )
    raw = sum(a == b for a, b in zip(judge_choices, human_choices)) / len(judge_choices)
    return {"raw_agreement": raw, "kappa": cohen_kappa(judge_choices, human_choices)}


@dataclass(frozen=True)
class JudgeRunReport:
    rates: dict[str, dict[str, float]]
    n_samples: int
    excluded: int

    def as_dict(self) -> dict:
        return {
            "rates": self.rates,
            "n_samples": self.n_samples,
            "excluded": self.excluded,
        }


def judge_run(
    pairs: list[DataPair],
    candidate_a: ChatBackendSpec,
    candidate_b: ChatBackendSpec,
    judge: ChatBackendSpec,
    g: Guideline,
    seed: int,
    n: int | None = None,
) -> JudgeRunReport:
    """Sample n records by seed, generate feedback with both candidates, and
    judge every pair. Backend hard failures exclude the sample, counted."""
    ordered = sorted(pairs, key=lambda p: p.dialogue.dialogue_id)
    if n is not None and n < len(ordered):
        ordered = random.Random(seed).sample(ordered, n)
    verdicts: list[JudgeVerdict] = []
    excluded = 0
    shared_judge = None if judge.kind == "scripted" else build_backend(judge)
    for pair in ordered:
        try:
            pred_a = run_supervision_inference(candidate_a, pair.dialogue, g)
            pred_b = run_supervision_inference(candidate_b, pair.dialogue, g)
            judge_backend = (
                shared_judge if shared_judge is not None else build_backend(judge)
            )
            verdicts.extend(
                judge_pairwise(
                    pair.dialogue,
                    pred_a.feedback_text,
                    pred_b.feedback_text,
                    judge_backend,
                    seed=stable_seed(seed, pair.dialogue.dialogue_id),
                )
            )
        except BackendError:
            excluded += 1
    return JudgeRunReport(
        rates=aggregate_judge(verdicts), n_samples=len(ordered) - excluded, excluded=excluded
    )
