"""Seed a store directory with one escalated record awaiting expert review."""

import sys

from mate.datastore import DatasetStore
from mate.records import (
    DataPair,
    DialogueRecord,
    RefinementStatus,
    SupervisionFeedback,
    Utterance,
)


def main(root: str) -> None:
    turns = (
        Utterance(1, "therapist", "You should simply stop worrying so much about it."),
        Utterance(2, "client", "I suppose I could try that."),
        Utterance(3, "therapist", "Right, just put the deadline out of your mind."),
        Utterance(4, "client", "Maybe. It keeps coming back though."),
    )
    dialogue = DialogueRecord(
        dialogue_id="dlg-escalated-1",
        client_id="case-001",
        mistake_id=2,
        sample_index=0,
        turns=turns,
        created_at="2026-08-14T00:00:00+00:00",
        generator_meta={"source": "review_fixture"},
    )
    feedback = SupervisionFeedback(
        problematic_turns=frozenset({1, 3}),
        problematic_quotes=("You should simply stop worrying so much about it.",),
        category_id=2,
        feedback_text=None,
        refinement_status=RefinementStatus.NEED_HUMAN,
    )
    pair = DataPair(dialogue=dialogue, feedback=feedback)
    store = DatasetStore(root)
    store.append(pair)
    store.enqueue_review(pair, reason="vgr_escalation")
    print(f"seeded escalated fixture into {root}")


if __name__ == "__main__":
    main(sys.argv[1])
