"""Core dialogue and feedback records plus their JSONL wire forms."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import FormatError, ValidationError

SCHEMA_VERSION = "1"

THERAPIST = "therapist"
CLIENT = "client"


class RefinementStatus(str, Enum):
    NONE = "none"
    VGR_REFINED = "vgr_refined"
    NEED_HUMAN = "need_human"
    MANUAL = "manual"


@dataclass(frozen=True)
class Utterance:
    turn_index: int
    role: str
    text: str

    def __post_init__(self):
        if self.turn_index < 1:
            raise ValidationError(f"turn_index must be >= 1, got {self.turn_index}")
        if self.role not in (THERAPIST, CLIENT):
            raise ValidationError(f"unknown role {self.role!r}")
        if not self.text.strip():
            raise ValidationError(f"turn {self.turn_index}: empty text")


@dataclass(frozen=True)
class SupervisionFeedback:
    """The (problematic utterances, category, feedback text) triple.

    ``feedback_text`` is None exactly when the sample escalated to human
    review (status need_human).
    """

    problematic_turns: frozenset[int]
    problematic_quotes: tuple[str, ...]
    category_id: int
    feedback_text: str | None
    refinement_status: RefinementStatus = RefinementStatus.NONE

    def __post_init__(self):
        escalated = self.refinement_status is RefinementStatus.NEED_HUMAN
        if escalated != (self.feedback_text is None):
            raise ValidationError(
                "feedback_text must be absent exactly when status is need_human"
            )


@dataclass(frozen=True)
class DialogueRecord:
    dialogue_id: str
    client_id: str
    mistake_id: int
    sample_index: int
    turns: tuple[Utterance, ...]
    created_at: str
    generator_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        validate_turns(self.turns)

    def therapist_turns(self) -> list[Utterance]:
        return [u for u in self.turns if u.role == THERAPIST]

    def exchange_count(self) -> int:
        """Number of therapist-client exchange pairs."""
        return len(self.therapist_turns())

    def transcript(self) -> str:
        return "\n".join(f"[{u.turn_index}] {u.role}: {u.text}" for u in self.turns)


def validate_turns(turns: tuple[Utterance, ...] | list[Utterance]) -> None:
    """Check strict therapist-first alternation and 1..n indexing."""
    for i, u in enumerate(turns):
        expected_role = THERAPIST if i % 2 == 0 else CLIENT
        if u.role != expected_role:
            raise ValidationError(
                f"turn {i + 1}: expected role {expected_role}, got {u.role}"
            )
        if u.turn_index != i + 1:
            raise ValidationError(
                f"turn at position {i + 1} carries turn_index {u.turn_index}"
            )


@dataclass(frozen=True)
class DataPair:
    dialogue: DialogueRecord
    feedback: SupervisionFeedback

    def __post_init__(self):
        validate_pair(self.dialogue, self.feedback)

    def key(self) -> tuple[str, int, int]:
        d = self.dialogue
        return (d.client_id, d.mistake_id, d.sample_index)

    def with_feedback(self, feedback: SupervisionFeedback) -> "DataPair":
        return replace(self, feedback=feedback)


def validate_pair(dialogue: DialogueRecord, feedback: SupervisionFeedback) -> None:
    therapist_indices = {u.turn_index for u in dialogue.therapist_turns()}
    bad = set(feedback.problematic_turns) - therapist_indices
    if bad:
        raise ValidationError(
            f"problematic_turns {sorted(bad)} are not therapist turns of "
            f"{dialogue.dialogue_id}"
        )
    if feedback.category_id != dialogue.mistake_id:
        raise ValidationError(
            f"feedback category {feedback.category_id} does not match the "
            f"injected mistake {dialogue.mistake_id}"
        )


def pair_to_wire(pair: DataPair) -> dict:
    """Flatten a DataPair into the documented JSONL record schema."""
    d, f = pair.dialogue, pair.feedback
    return {
        "schema_version": SCHEMA_VERSION,
        "dialogue_id": d.dialogue_id,
        "client_id": d.client_id,
        "mistake_id": d.mistake_id,
        "sample_index": d.sample_index,
        "turns": [
            {"turn_index": u.turn_index, "role": u.role, "text": u.text} for u in d.turns
        ],
        "feedback": {
            "problematic_turns": sorted(f.problematic_turns),
            "problematic_quotes": list(f.problematic_quotes),
            "category_id": f.category_id,
            "feedback_text": f.feedback_text,
            "refinement_status": f.refinement_status.value,
        },
        "generator_meta": d.generator_meta,
        "created_at": d.created_at,
    }


def pair_from_wire(raw: dict) -> DataPair:
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"unrecognized schema_version {raw.get('schema_version')!r}")
    try:
        turns = tuple(
            Utterance(turn_index=t["turn_index"], role=t["role"], text=t["text"])
            for t in raw["turns"]
        )
        dialogue = DialogueRecord(
            dialogue_id=raw["dialogue_id"],
            client_id=raw["client_id"],
            mistake_id=int(raw["mistake_id"]),
            sample_index=int(raw["sample_index"]),
            turns=turns,
            created_at=raw["created_at"],
            generator_meta=raw.get("generator_meta", {}),
        )
        fb = raw["feedback"]
        feedback = SupervisionFeedback(
            problematic_turns=frozenset(fb["problematic_turns"]),
            problematic_quotes=tuple(fb["problematic_quotes"]),
            category_id=int(fb["category_id"]),
            feedback_text=fb["feedback_text"],
            refinement_status=RefinementStatus(fb["refinement_status"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed dataset record: {exc}") from exc
    return DataPair(dialogue=dialogue, feedback=feedback)
