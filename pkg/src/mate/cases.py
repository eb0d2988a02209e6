"""Client cognitive-model cases that drive the simulated patient.

A case couples a free-text background profile with a six-field cognitive
model (core beliefs, intermediate beliefs, automatic thoughts, emotions,
situations, behaviors). The package ships a small synthetic sample set;
a full external case set in the same schema can be dropped in via the
case-file path arguments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import FormatError, NotFoundError, ValidationError

SAMPLE_CASES_RESOURCE = "cases.sample.json"

# Rendering order is fixed so prompts are stable across runs.
COGNITIVE_MODEL_FIELDS = (
    "core_beliefs",
    "intermediate_beliefs",
    "automatic_thoughts",
    "emotions",
    "situations",
    "behaviors",
)

_FIELD_TITLES = {
    "core_beliefs": "Core beliefs",
    "intermediate_beliefs": "Intermediate beliefs",
    "automatic_thoughts": "Automatic thoughts",
    "emotions": "Emotions",
    "situations": "Situations",
    "behaviors": "Behaviors",
}


@dataclass(frozen=True)
class ClientCase:
    id: str
    name: str
    profile: str
    cognitive_model: dict[str, list[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class CaseSet:
    cases: tuple[ClientCase, ...]
    source: str

    def __len__(self) -> int:
        return len(self.cases)

    def get(self, case_id: str) -> ClientCase:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise NotFoundError(f"no case with id {case_id!r}")

    def ids(self) -> list[str]:
        return [c.id for c in self.cases]


def _as_text_list(value: object) -> list[str]:
    if isinstance(value, str):
        return [value] if value.strip() else []
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return [v for v in value if v.strip()]
    raise FormatError(f"cognitive model field must be text or a text list, got {value!r}")


def parse_cases(payload: object) -> CaseSet:
    if not isinstance(payload, dict):
        raise FormatError("case file must hold a JSON object at top level")
    raw_cases = payload.get("cases")
    if not isinstance(raw_cases, list):
        raise FormatError("case file missing 'cases' list")
    cases: list[ClientCase] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_cases):
        if not isinstance(raw, dict):
            raise FormatError(f"cases[{i}] is not an object")
        try:
            case_id = str(raw["id"])
            model_raw = raw.get("cognitive_model") or {}
            model = {k: _as_text_list(model_raw.get(k, [])) for k in COGNITIVE_MODEL_FIELDS}
            case = ClientCase(
                id=case_id,
                name=str(raw.get("name", case_id)),
                profile=str(raw["profile"]),
                cognitive_model=model,
            )
        except KeyError as exc:
            raise FormatError(f"cases[{i}]: missing field {exc}") from exc
        if not case.profile.strip():
            raise ValidationError(f"case {case.id!r}: empty profile")
        if not case.cognitive_model["core_beliefs"]:
            raise ValidationError(f"case {case.id!r}: empty core_beliefs")
        if case.id in seen:
            raise ValidationError(f"case {case.id!r}: duplicate id")
        seen.add(case.id)
        cases.append(case)
    if not cases:
        raise ValidationError("case set is empty")
    return CaseSet(cases=tuple(cases), source=str(payload.get("source", "unknown")))


def load_cases(path: str | Path) -> CaseSet:
    """Load and validate a case JSON file, preserving order."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise NotFoundError(f"case file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return parse_cases(payload)


def sample_cases_path() -> Path:
    return Path(str(resources.files("mate").joinpath("data", SAMPLE_CASES_RESOURCE)))


def load_sample_cases() -> CaseSet:
    return load_cases(sample_cases_path())


def render_case_profile(case: ClientCase) -> str:
    """Deterministic textual rendering of a case for the client-agent prompt.

    Every non-empty cognitive-model field appears verbatim, in fixed order.
    """
    lines = [f"Client: {case.name}", "", "Background:", case.profile, ""]
    lines.append("Cognitive model:")
    for key in COGNITIVE_MODEL_FIELDS:
        values = case.cognitive_model.get(key, [])
        if not values:
            continue
        lines.append(f"- {_FIELD_TITLES[key]}:")
        for value in values:
            lines.append(f"  * {value}")
    return "\n".join(lines)
