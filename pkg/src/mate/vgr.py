"""Validator-guided refinement: a refine-validate closed loop per sample.

Each feedback text is first audited as-is; non-compliant feedback enters a
refine-then-validate loop with a bounded retry budget. Compliance means all
four checklist dimensions pass. Samples that exhaust the budget lose their
feedback text and are flagged for human review.

Validator wire format (mirrors the supervisor contract):

    PROGRESSIVITY: PASS|FAIL
    ACTIONABILITY: PASS|FAIL
    ETHICALITY: PASS|FAIL
    SUPPORTIVENESS: PASS|FAIL
    RATIONALE: <free text>
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .agents import load_template
from .backends import ChatBackend, ChatBackendSpec, build_backend, chat
from .errors import BackendError, ValidationError
from .guideline import Guideline
from .records import DataPair, DialogueRecord, RefinementStatus, SupervisionFeedback

DIMENSIONS = ("progressivity", "actionability", "ethicality", "supportiveness")

PARSE_FAILURE_RATIONALE = "parse_failure"


@dataclass(frozen=True)
class ValidationVerdict:
    progressivity: bool
    actionability: bool
    ethicality: bool
    supportiveness: bool
    rationale: str

    def compliant(self) -> bool:
        return (
            self.progressivity
            and self.actionability
            and self.ethicality
            and self.supportiveness
        )


@dataclass(frozen=True)
class VgrConfig:
    """Loop hyperparameters; the defaults are documented, overridable choices."""

    validator: ChatBackendSpec
    n_retry: int = 3
    temperature: float = 0.7

    def __post_init__(self):
        if self.n_retry < 1:
            raise ValidationError("n_retry must be >= 1")
        if not (0.0 < self.temperature <= 1.0):
            raise ValidationError("temperature must be in (0, 1]")


@dataclass
class VgrReport:
    unchanged: int = 0
    refined: int = 0
    escalated: int = 0

    def as_dict(self) -> dict:
        return {
            "unchanged": self.unchanged,
            "refined": self.refined,
            "escalated": self.escalated,
        }


def _category_label(f: SupervisionFeedback, g: Guideline | None) -> str:
    if g is not None:
        return g.get(f.category_id).category_name
    return f"category #{f.category_id}"


def build_refine_prompt(
    d: DialogueRecord, f: SupervisionFeedback, g: Guideline | None = None
) -> str:
    """Deterministic refine prompt embedding the transcript and all three
    feedback components."""
    if f.feedback_text is None:
        raise ValidationError("cannot refine feedback that is awaiting human review")
    quotes = "\n".join(f'"{q}"' for q in f.problematic_quotes) or "(none)"
    return load_template("refine").format(
        transcript=d.transcript(),
        quotes=quotes,
        category=_category_label(f, g),
        feedback=f.feedback_text,
    )


def refine_feedback(
    d: DialogueRecord,
    f: SupervisionFeedback,
    cfg: VgrConfig,
    backend: ChatBackend | None = None,
    g: Guideline | None = None,
) -> str:
    """One refinement attempt: returns the candidate improved feedback text."""
    backend = backend or build_backend(cfg.validator)
    return chat(
        backend,
        "You refine clinical supervision feedback.",
        [{"role": "user", "content": build_refine_prompt(d, f, g)}],
        temperature=cfg.temperature,
        role="refine",
    ).strip()


def _parse_verdict(raw: str) -> ValidationVerdict:
    values: dict[str, bool] = {}
    rationale = ""
    for line in raw.splitlines():
        stripped = line.strip()
        upper = stripped.upper()
        for dim in DIMENSIONS:
            prefix = dim.upper() + ":"
            if upper.startswith(prefix):
                token = upper[len(prefix) :].strip()
                if token in ("PASS", "FAIL"):
                    values[dim] = token == "PASS"
        if upper.startswith("RATIONALE:"):
            rationale = stripped[len("RATIONALE:") :].strip()
    if set(values) != set(DIMENSIONS):
        return ValidationVerdict(
            progressivity=False,
            actionability=False,
            ethicality=False,
            supportiveness=False,
            rationale=PARSE_FAILURE_RATIONALE,
        )
    return ValidationVerdict(rationale=rationale, **values)


def validate_feedback(
    d: DialogueRecord,
    f_old: str,
    f_new: str,
    cfg: VgrConfig,
    backend: ChatBackend | None = None,
) -> ValidationVerdict:
    """Audit a candidate feedback against the four-dimension checklist.

    An unparseable validator answer counts as non-compliant with rationale
    "parse_failure" (it consumes a retry rather than crashing the loop).
    """
    if not f_old.strip() or not f_new.strip():
        raise ValidationError("validate_feedback requires non-empty texts")
    backend = backend or build_backend(cfg.validator)
    raw = chat(
        backend,
        "You audit clinical supervision feedback.",
        [
            {
                "role": "user",
                "content": load_template("validate").format(
                    transcript=d.transcript(), original=f_old, candidate=f_new
                ),
            }
        ],
        role="validate",
    )
    return _parse_verdict(raw)


def refine_pair(
    pair: DataPair,
    cfg: VgrConfig,
    backend: ChatBackend | None = None,
    g: Guideline | None = None,
) -> tuple[DataPair, str]:
    """Run the loop for a single pair against an explicit backend.

    Useful for drivers that manage backend lifetimes themselves (and for
    observing exact call counts through a scripted backend's log).
    """
    if pair.feedback.feedback_text is None:
        raise ValidationError(f"{pair.dialogue.dialogue_id}: feedback already escalated")
    return _refine_one(pair, cfg, backend or build_backend(cfg.validator), g)


def _refine_one(
    pair: DataPair, cfg: VgrConfig, backend: ChatBackend, g: Guideline | None
) -> tuple[DataPair, str]:
    """Returns (updated pair, outcome in {unchanged, refined, escalated})."""
    d, f = pair.dialogue, pair.feedback
    original = f.feedback_text
    # Pre-screen: feedback that already passes the checklist is kept as-is.
    if validate_feedback(d, original, original, cfg, backend).compliant():
        return pair, "unchanged"
    for _ in range(cfg.n_retry):
        try:
            candidate = refine_feedback(d, f, cfg, backend, g)
            verdict = validate_feedback(d, original, candidate, cfg, backend)
        except BackendError:
            continue  # a failed attempt consumes its slot in the budget
        if verdict.compliant():
            updated = replace(
                f,
                feedback_text=candidate,
                refinement_status=RefinementStatus.VGR_REFINED,
            )
            return pair.with_feedback(updated), "refined"
    escalated = replace(
        f, feedback_text=None, refinement_status=RefinementStatus.NEED_HUMAN
    )
    return pair.with_feedback(escalated), "escalated"


def vgr_pass(
    pairs: list[DataPair], cfg: VgrConfig, g: Guideline | None = None
) -> tuple[list[DataPair], VgrReport]:
    """Run the refine-validate loop over every pair.

    Only the feedback text ever changes; dialogues, flagged turns, and
    category labels pass through untouched. Scripted validator backends are
    rebuilt per pair so each pair replays the same script.
    """
    for pair in pairs:
        if pair.feedback.feedback_text is None:
            raise ValidationError(
                f"{pair.dialogue.dialogue_id}: feedback already escalated"
            )
    shared = None if cfg.validator.kind == "scripted" else build_backend(cfg.validator)
    out: list[DataPair] = []
    report = VgrReport()
    for pair in pairs:
        backend = shared if shared is not None else build_backend(cfg.validator)
        updated, outcome = _refine_one(pair, cfg, backend, g)
        out.append(updated)
        setattr(report, outcome, getattr(report, outcome) + 1)
    return out, report
