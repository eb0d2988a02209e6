"""The three role agents and the supervisor output wire format.

Agents are thin prompt builders over a chat backend: a therapist that weaves
one guideline behavior into its turns, a client driven by a cognitive-model
case, and an omniscient supervisor that is told which behavior was injected
and must locate it and write feedback.

The supervisor output contract is three labeled sections in order:

    PROBLEMATIC_UTTERANCES:
    "<verbatim fragment>"            (one per line, or the literal NONE)
    CATEGORY: <category name>
    FEEDBACK:
    <free text to end>
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .backends import ChatBackend, chat
from .cases import ClientCase, render_case_profile
from .errors import ParseError, ValidationError
from .guideline import Guideline, MistakeSpec
from .records import (
    CLIENT,
    THERAPIST,
    DialogueRecord,
    RefinementStatus,
    SupervisionFeedback,
    Utterance,
)
from .util import normalize_quote, normalize_text

TEMPLATE_VERSION = "1"

SECTION_UTTERANCES = "PROBLEMATIC_UTTERANCES:"
SECTION_CATEGORY = "CATEGORY:"
SECTION_FEEDBACK = "FEEDBACK:"
NO_QUOTES = "NONE"

_QUOTE_PAIRS = [('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’")]


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return resources.files("mate").joinpath("templates", f"{name}.txt").read_text("utf-8")


def therapist_system_prompt(m: MistakeSpec) -> str:
    if m.is_exemplary:
        return load_template("therapist_exemplary").format(behavior=m.behavior)
    return load_template("therapist_mistake").format(
        category=m.category_name, behavior=m.behavior
    )


def client_system_prompt(case: ClientCase) -> str:
    return load_template("client").format(case_profile=render_case_profile(case))


def supervisor_system_prompt(m: MistakeSpec) -> str:
    return load_template("supervisor").format(
        category=m.category_name, behavior=m.behavior, correction=m.correction
    )


def _history_messages(history: list[Utterance], speaker: str) -> list[dict[str, str]]:
    """Map a transcript to chat messages from the speaker's point of view."""
    messages = [
        {"role": "assistant" if u.role == speaker else "user", "content": u.text}
        for u in history
    ]
    if not messages:
        messages.append(
            {"role": "user", "content": "(The session begins. Open the interview.)"}
        )
    return messages


def therapist_turn(
    history: list[Utterance], m: MistakeSpec, backend: ChatBackend
) -> Utterance:
    """Generate the next therapist utterance; history must end on a client turn."""
    if history and history[-1].role != CLIENT:
        raise ValidationError("therapist_turn requires history ending with a client turn")
    text = chat(
        backend,
        therapist_system_prompt(m),
        _history_messages(history, speaker=THERAPIST),
        role=THERAPIST,
    )
    return Utterance(turn_index=len(history) + 1, role=THERAPIST, text=text)


def client_turn(
    history: list[Utterance], case: ClientCase, backend: ChatBackend
) -> Utterance:
    """Generate the client reply; history must end on a therapist turn."""
    if not history or history[-1].role != THERAPIST:
        raise ValidationError("client_turn requires history ending with a therapist turn")
    text = chat(
        backend,
        client_system_prompt(case),
        _history_messages(history, speaker=CLIENT),
        role=CLIENT,
    )
    return Utterance(turn_index=len(history) + 1, role=CLIENT, text=text)


def _strip_wrapping_quotes(line: str) -> str:
    line = line.strip()
    for open_q, close_q in _QUOTE_PAIRS:
        if len(line) >= 2 and line.startswith(open_q) and line.endswith(close_q):
            return line[1:-1].strip()
    return line


def split_sections(raw: str) -> tuple[list[str], str, str]:
    """Split raw supervisor output into (quote lines, category name, feedback)."""
    lines = raw.splitlines()
    try:
        start = next(
            i for i, ln in enumerate(lines) if ln.strip().startswith(SECTION_UTTERANCES)
        )
    except StopIteration:
        raise ParseError(f"missing {SECTION_UTTERANCES} section", raw=raw) from None
    category_idx = None
    feedback_idx = None
    for i in range(start + 1, len(lines)):
        stripped = lines[i].strip()
        if category_idx is None and stripped.startswith(SECTION_CATEGORY):
            category_idx = i
        elif category_idx is not None and stripped.startswith(SECTION_FEEDBACK):
            feedback_idx = i
            break
    if category_idx is None:
        raise ParseError(f"missing {SECTION_CATEGORY} section", raw=raw)
    if feedback_idx is None:
        raise ParseError(f"missing {SECTION_FEEDBACK} section", raw=raw)

    quote_lines = []
    for ln in lines[start + 1 : category_idx]:
        stripped = ln.strip()
        if not stripped or stripped.startswith("("):
            continue
        quote_lines.append(stripped)
    category = lines[category_idx].strip()[len(SECTION_CATEGORY) :].strip()
    first = lines[feedback_idx].strip()[len(SECTION_FEEDBACK) :].strip()
    rest = "\n".join(lines[feedback_idx + 1 :]).strip()
    feedback = "\n".join(part for part in (first, rest) if part).strip()
    if not feedback:
        raise ParseError("empty FEEDBACK section", raw=raw)
    return quote_lines, category, feedback


def resolve_quote(quote: str, dialogue: DialogueRecord) -> list[int]:
    """Therapist turn indices whose normalized text contains the quote.

    Matching is normalized exact substring: case-folded, whitespace collapsed,
    surrounding punctuation stripped from the quote. No fuzzy matching. A quote
    that matches only client turns violates the therapist-only constraint.
    """
    needle = normalize_quote(quote)
    if not needle:
        raise ParseError(f"empty quote {quote!r}")
    matches = [
        u.turn_index
        for u in dialogue.turns
        if u.role == THERAPIST and needle in normalize_text(u.text)
    ]
    if matches:
        return matches
    client_hit = any(
        u.role == CLIENT and needle in normalize_text(u.text) for u in dialogue.turns
    )
    if client_hit:
        raise ParseError(
            f"quote matches a client turn, but only therapist turns may be flagged: "
            f"{quote!r}"
        )
    raise ParseError(f"quote not found in any therapist turn: {quote!r}")


def _parse_quotes(
    quote_lines: list[str], dialogue: DialogueRecord
) -> tuple[frozenset[int], tuple[str, ...]]:
    if len(quote_lines) == 1 and quote_lines[0].strip().upper() == NO_QUOTES:
        return frozenset(), ()
    quotes = tuple(_strip_wrapping_quotes(ln) for ln in quote_lines)
    turns: set[int] = set()
    for q in quotes:
        turns.update(resolve_quote(q, dialogue))
    return frozenset(turns), quotes


def parse_supervisor_output(
    raw: str, dialogue: DialogueRecord, g: Guideline
) -> SupervisionFeedback:
    """Parse the three-section supervisor format into a SupervisionFeedback.

    Raises ParseError on a missing section, an unknown category name, a quote
    that matches no therapist turn, or a quote that matches only client turns.
    """
    quote_lines, category_name, feedback = split_sections(raw)
    try:
        entry = g.by_category_name(category_name)
    except Exception:
        raise ParseError(f"unknown category name {category_name!r}", raw=raw) from None
    turns, quotes = _parse_quotes(quote_lines, dialogue)
    return SupervisionFeedback(
        problematic_turns=turns,
        problematic_quotes=quotes,
        category_id=entry.id,
        feedback_text=feedback,
        refinement_status=RefinementStatus.NONE,
    )


def format_supervisor_output(feedback: SupervisionFeedback, g: Guideline) -> str:
    """Render a SupervisionFeedback in the supervisor wire format.

    Inverse of parse_supervisor_output for feedback whose quotes resolve to
    exactly its problematic_turns.
    """
    if feedback.feedback_text is None:
        raise ValidationError("cannot format feedback that is awaiting human review")
    category = g.get(feedback.category_id).category_name
    lines = [SECTION_UTTERANCES]
    if feedback.problematic_quotes:
        lines.extend(f'"{q}"' for q in feedback.problematic_quotes)
    else:
        lines.append(NO_QUOTES)
    lines.append(f"{SECTION_CATEGORY} {category}")
    lines.append(SECTION_FEEDBACK)
    lines.append(feedback.feedback_text)
    return "\n".join(lines)


def supervise(
    dialogue: DialogueRecord,
    m: MistakeSpec,
    backend: ChatBackend,
    max_retries: int = 2,
) -> SupervisionFeedback:
    """Run the omniscient supervisor over a finished dialogue.

    The supervisor is told which behavior was injected, so the category label
    comes from the schedule (category_id = m.id); the model's job is locating
    the utterances and writing the feedback. Unparseable output is re-asked up
    to max_retries times. Exemplary dialogues must come back with no quotes.
    """
    system = supervisor_system_prompt(m)
    messages = [{"role": "user", "content": dialogue.transcript()}]
    last: ParseError | None = None
    for _ in range(max_retries + 1):
        raw = chat(backend, system, messages, role="supervisor")
        try:
            quote_lines, _category, feedback = split_sections(raw)
            turns, quotes = _parse_quotes(quote_lines, dialogue)
            if m.is_exemplary and turns:
                raise ParseError(
                    "exemplary-practice dialogue must not flag utterances", raw=raw
                )
            return SupervisionFeedback(
                problematic_turns=turns,
                problematic_quotes=quotes,
                category_id=m.id,
                feedback_text=feedback,
                refinement_status=RefinementStatus.NONE,
            )
        except ParseError as exc:
            last = exc
    raise ParseError(
        f"supervisor output unparseable after {max_retries + 1} attempts: {last}",
        raw=last.raw if last else "",
    )
