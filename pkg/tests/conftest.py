import pytest

from mate.backends import ChatBackendSpec, ScriptedBackend, spec_from_dict
from mate.cases import load_sample_cases
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

FIXED_TIME = "2026-08-14T00:00:00+00:00"

THERAPIST_LINES = (
    "Tell me more about what brought you in this week.",
    "You should simply stop worrying so much about it.",
    "What usually happens in your body when the worry starts?",
)
CLIENT_LINES = (
    "It has been a hard week; the deadline kept me up at night.",
    "Maybe. I suppose I could try that.",
    "My chest gets tight and I cannot focus on anything.",
)


@pytest.fixture(autouse=True)
def fixed_time(monkeypatch):
    # Pin every timestamp the toolkit writes so outputs are byte-stable.
    monkeypatch.setenv("MATE_FIXED_TIME", FIXED_TIME)


@pytest.fixture(scope="session")
def guideline():
    return load_default_guideline()


@pytest.fixture(scope="session")
def cases():
    return load_sample_cases()


def make_dialogue(
    n_exchanges: int = 2,
    client_id: str = "case-001",
    mistake_id: int = 2,
    sample_index: int = 1,
    therapist_lines: tuple = THERAPIST_LINES,
    client_lines: tuple = CLIENT_LINES,
) -> DialogueRecord:
    turns = []
    for i in range(n_exchanges):
        turns.append(
            Utterance(2 * i + 1, THERAPIST, therapist_lines[i % len(therapist_lines)])
        )
        turns.append(Utterance(2 * i + 2, CLIENT, client_lines[i % len(client_lines)]))
    return DialogueRecord(
        dialogue_id=f"{client_id}__m{mistake_id:02d}__s{sample_index}",
        client_id=client_id,
        mistake_id=mistake_id,
        sample_index=sample_index,
        turns=tuple(turns),
        created_at=FIXED_TIME,
    )


def make_pair(
    mistake_id: int = 2,
    client_id: str = "case-001",
    sample_index: int = 1,
    n_exchanges: int = 2,
    status: RefinementStatus = RefinementStatus.NONE,
    feedback_text: str | None = "Explore the worry before prescribing solutions.",
    problematic_turns: frozenset[int] | None = frozenset({3}),
    quotes: tuple = ("You should simply stop worrying so much",),
) -> DataPair:
    dialogue = make_dialogue(
        n_exchanges=n_exchanges,
        client_id=client_id,
        mistake_id=mistake_id,
        sample_index=sample_index,
    )
    feedback = SupervisionFeedback(
        problematic_turns=(
            frozenset() if problematic_turns is None else problematic_turns
        ),
        problematic_quotes=quotes,
        category_id=mistake_id,
        feedback_text=feedback_text,
        refinement_status=status,
    )
    return DataPair(dialogue=dialogue, feedback=feedback)


def scripted(scripts: dict, loop: bool = False) -> ScriptedBackend:
    return ScriptedBackend(scripts, loop=loop)


def scripted_spec(scripts: dict, loop: bool = False) -> ChatBackendSpec:
    return spec_from_dict({"kind": "scripted", "scripts": scripts, "loop": loop})


SUPERVISOR_NONE_REPLY = (
    "PROBLEMATIC_UTTERANCES:\nNONE\nCATEGORY: Exemplary Practice\n"
    "FEEDBACK: The therapist paced the session well."
)


def dialogue_scripts(loop: bool = True) -> dict:
    return {
        "therapist": list(THERAPIST_LINES),
        "client": list(CLIENT_LINES),
    }


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the per-criterion PASS lines after the run.

    The release-gate tests print one line each; default output capture
    would otherwise hide them unless the suite runs with -s.
    """
    lines = set()
    for reports in terminalreporter.stats.values():
        for report in reports:
            if getattr(report, "when", "") != "call":
                continue
            for line in getattr(report, "capstdout", "").splitlines():
                if line.startswith("ACCEPTANCE"):
                    lines.add(line)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
