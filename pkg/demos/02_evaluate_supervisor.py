# coding: utf-8

# # Scoring a supervisor model
#
# At evaluation time nothing tells the supervisor which mistake was staged.
# It has to read the transcript cold and answer three questions in order:
# which turns were problematic, which behavior category they show, and what
# feedback to give. This script runs that pipeline with scripted answers and
# walks through every score the harness produces.

import json
import random

from mate.backends import spec_from_dict
from mate.datastore import cohen_kappa
from mate.evaluate.bootstrap import paired_bootstrap_ci
from mate.evaluate.inference import evaluate_objective, run_supervision_inference
from mate.evaluate.judge import aggregate_judge, judge_pairwise
from mate.evaluate.textoverlap import bleu4, rouge
from mate.guideline import load_default_guideline
from mate.records import (
    CLIENT,
    THERAPIST,
    DataPair,
    DialogueRecord,
    RefinementStatus,
    SupervisionFeedback,
    Utterance,
)

g = load_default_guideline()


def fixture_pair(client_id: str) -> DataPair:
    dialogue = DialogueRecord(
        dialogue_id=f"{client_id}__m02__s1",
        client_id=client_id,
        mistake_id=2,
        sample_index=1,
        turns=(
            Utterance(1, THERAPIST, "Tell me more about what brought you in this week."),
            Utterance(2, CLIENT, "It has been a hard week; the deadline kept me up at night."),
            Utterance(3, THERAPIST, "You should simply stop worrying so much about it."),
            Utterance(4, CLIENT, "Maybe. I suppose I could try that."),
        ),
        created_at="2026-08-14T00:00:00+00:00",
    )
    feedback = SupervisionFeedback(
        problematic_turns=frozenset({3}),
        problematic_quotes=("You should simply stop worrying so much",),
        category_id=2,
        feedback_text="Explore the worry before prescribing solutions.",
        refinement_status=RefinementStatus.NONE,
    )
    return DataPair(dialogue=dialogue, feedback=feedback)


gold = [fixture_pair(f"case-{i:03d}") for i in range(1, 9)]

# ## Three-stage inference
#
# The stages answer under the roles "locate", "classify", and "feedback".
# This script nails the location and category, so both objective tasks come
# out perfect. Misquote a turn or name a nonexistent category and the scores
# drop instead of crashing; parse failures degrade to documented sentinels.

supervisor = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "locate": ['"You should simply stop worrying so much"'],
            "classify": ["Premature Advice Giving"],
            "feedback": ["Hold the advice until the worry has been explored."],
        },
    }
)

pred = run_supervision_inference(supervisor, gold[0].dialogue, g)
print(f"predicted turns    {sorted(pred.problematic_turns)}")
print(f"predicted category {pred.category_id} ({g.get(pred.category_id).category_name})")
print(f"predicted feedback {pred.feedback_text!r}")

objective = evaluate_objective(gold, supervisor, g)
print(json.dumps(objective.as_dict(), indent=2))

# ## Text overlap
#
# Generated feedback is compared against the reference with BLEU-4 and
# ROUGE. Both live in this package, so the numbers are reproducible without
# pulling in a scoring service.

reference = gold[0].feedback.feedback_text
candidate = pred.feedback_text
print(f"bleu4 {bleu4(candidate, reference):.4f}  rouge {rouge(candidate, reference)}")

# ## Pairwise judging
#
# A judge model picks between two candidate feedbacks criterion by
# criterion. Presentation order is drawn from the seed and the verdict is
# mapped back, so a judge with a position habit gains nothing. The scripted
# judge below just prefers the concrete suggestion wherever it appears.

GOOD = "Name the racing thoughts and invite the client to slow down."
WEAK = "Nice work overall."


class ContentJudge:
    def complete(self, system_prompt, messages, temperature=None, role=None):
        prompt = messages[-1]["content"]
        winner = "A" if prompt.index(GOOD) < prompt.index(WEAK) else "B"
        return f"WINNER: {winner}\nRATIONALE: picks the concrete move"


verdicts = judge_pairwise(gold[0].dialogue, GOOD, WEAK, ContentJudge(), seed=3)
for v in verdicts:
    print(f"{v.criterion:<22} winner={v.winner} shown as {v.presentation_order}")
print(json.dumps(aggregate_judge(verdicts), indent=2))

# ## Agreement and uncertainty
#
# Cohen's kappa checks the judge against human choices on the same items.
# The paired bootstrap puts a confidence interval on a before/after score
# difference; with a fixed seed the interval is reproducible to the byte.

judge_choices = ["a"] * 20 + ["a"] * 5 + ["b"] * 10 + ["b"] * 15
human_choices = ["a"] * 20 + ["b"] * 5 + ["a"] * 10 + ["b"] * 15
print(f"kappa vs humans: {cohen_kappa(judge_choices, human_choices):.3f}")

rng = random.Random(5)
before = [rng.random() for _ in range(40)]
after = [b + 0.08 + rng.random() * 0.05 for b in before]
ci = paired_bootstrap_ci(before, after, n_resamples=5000, seed=7)
print(json.dumps(ci.as_dict(), indent=2))
