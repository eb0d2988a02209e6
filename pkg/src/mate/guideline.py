"""Mistaken-behavior guideline: the taxonomy driving agents and labels.

Each entry pairs a named category of mistaken therapeutic behavior with a
detailed behavior description and a correction strategy. Exactly one entry
is the exemplary-practice category, which carries no mistake. The guideline
is configuration data: the default file shipped with the package can be
replaced by any file satisfying the same schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import FormatError, NotFoundError, ValidationError
from .util import normalize_text

DEFAULT_GUIDELINE_RESOURCE = "guideline.default.json"


@dataclass(frozen=True)
class MistakeSpec:
    """One guideline entry: (category name, behavior description, correction)."""

    id: int
    category_name: str
    behavior: str
    correction: str
    is_exemplary: bool = False


@dataclass(frozen=True)
class Guideline:
    entries: tuple[MistakeSpec, ...]
    version: str

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def exemplary(self) -> MistakeSpec:
        return next(e for e in self.entries if e.is_exemplary)

    def get(self, mistake_id: int) -> MistakeSpec:
        for entry in self.entries:
            if entry.id == mistake_id:
                return entry
        raise NotFoundError(f"no guideline entry with id {mistake_id}")

    def by_category_name(self, name: str) -> MistakeSpec:
        wanted = normalize_text(name)
        for entry in self.entries:
            if normalize_text(entry.category_name) == wanted:
                return entry
        raise NotFoundError(f"no guideline entry named {name!r}")

    def category_names(self) -> list[str]:
        return [e.category_name for e in self.entries]

    def digest(self) -> str:
        """Compact one-line-per-entry rendering for prompt embedding."""
        lines = []
        for e in self.entries:
            tag = " (exemplary)" if e.is_exemplary else ""
            lines.append(f"{e.id}. {e.category_name}{tag}: {e.behavior}")
        return "\n".join(lines)


def _validate(entries: list[MistakeSpec], version: str) -> Guideline:
    seen_ids: set[int] = set()
    seen_names: set[str] = set()
    exemplary_count = 0
    n = len(entries)
    if n == 0:
        raise ValidationError("guideline has no entries")
    for e in entries:
        label = f"entry id={e.id} ({e.category_name!r})"
        if not (1 <= e.id <= n):
            raise ValidationError(f"{label}: id out of range 1..{n}")
        if e.id in seen_ids:
            raise ValidationError(f"{label}: duplicate id")
        seen_ids.add(e.id)
        name_key = normalize_text(e.category_name)
        if not name_key:
            raise ValidationError(f"{label}: empty category_name")
        if name_key in seen_names:
            raise ValidationError(f"{label}: duplicate category_name")
        seen_names.add(name_key)
        if not e.behavior.strip():
            raise ValidationError(f"{label}: empty behavior")
        if not e.correction.strip():
            raise ValidationError(f"{label}: empty correction")
        exemplary_count += int(e.is_exemplary)
    if exemplary_count != 1:
        raise ValidationError(
            f"guideline must have exactly one exemplary entry, found {exemplary_count}"
        )
    return Guideline(entries=tuple(entries), version=version)


def parse_guideline(payload: object) -> Guideline:
    """Build a Guideline from already-decoded JSON, enforcing all invariants."""
    if not isinstance(payload, dict):
        raise FormatError("guideline file must hold a JSON object at top level")
    raw_entries = payload.get("entries")
    if not isinstance(raw_entries, list):
        raise FormatError("guideline file missing 'entries' list")
    entries = []
    for i, raw in enumerate(raw_entries):
        if not isinstance(raw, dict):
            raise FormatError(f"entries[{i}] is not an object")
        try:
            entries.append(
                MistakeSpec(
                    id=int(raw["id"]),
                    category_name=str(raw["category_name"]),
                    behavior=str(raw["behavior"]),
                    correction=str(raw["correction"]),
                    is_exemplary=bool(raw.get("is_exemplary", False)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"entries[{i}]: missing or malformed field: {exc}") from exc
    return _validate(entries, version=str(payload.get("version", "unversioned")))


def load_guideline(path: str | Path) -> Guideline:
    """Load and validate a guideline JSON file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise NotFoundError(f"guideline file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return parse_guideline(payload)


def default_guideline_path() -> Path:
    """Path of the packaged default guideline file."""
    return Path(str(resources.files("mate").joinpath("data", DEFAULT_GUIDELINE_RESOURCE)))


def load_default_guideline() -> Guideline:
    return load_guideline(default_guideline_path())


def serialize_guideline(g: Guideline) -> dict:
    """Inverse of parse_guideline, modulo whitespace normalization."""
    return {
        "version": g.version,
        "entries": [
            {
                "id": e.id,
                "category_name": e.category_name,
                "behavior": e.behavior,
                "correction": e.correction,
                "is_exemplary": e.is_exemplary,
            }
            for e in g.entries
        ],
    }


def get_mistake(g: Guideline, mistake_id: int) -> MistakeSpec:
    return g.get(mistake_id)
