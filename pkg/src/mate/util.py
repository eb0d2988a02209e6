"""Small shared helpers: normalization, seeding, clocks, atomic writes."""

from __future__ import annotations

import hashlib
import json
import os
import re
import unicodedata
from datetime import datetime, timezone
from pathlib import Path

_WS_RE = re.compile(r"\s+")

# Environment override used by tests and reproducibility checks: when set,
# every timestamp the toolkit writes is pinned to this ISO-8601 value.
FIXED_TIME_ENV = "MATE_FIXED_TIME"


def now_iso() -> str:
    """Current UTC time as ISO-8601, honoring the fixed-time override."""
    fixed = os.environ.get(FIXED_TIME_ENV)
    if fixed:
        return fixed
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def now_epoch() -> float:
    """Current UTC time in epoch seconds, honoring the fixed-time override."""
    fixed = os.environ.get(FIXED_TIME_ENV)
    if fixed:
        return datetime.fromisoformat(fixed).timestamp()
    return datetime.now(timezone.utc).timestamp()


def normalize_text(text: str) -> str:
    """Case-fold and collapse whitespace runs to single spaces."""
    return _WS_RE.sub(" ", text.casefold()).strip()


def normalize_quote(text: str) -> str:
    """Normalize a quoted fragment for substring matching.

    Case-folds, collapses whitespace, and strips surrounding punctuation
    (including straight and curly quote marks). Interior punctuation is
    kept so matching stays an exact-substring check.
    """
    text = normalize_text(text)
    while text and (unicodedata.category(text[0]).startswith("P") or text[0] in "\"'"):
        text = text[1:]
    while text and (unicodedata.category(text[-1]).startswith("P") or text[-1] in "\"'"):
        text = text[:-1]
    return text.strip()


def stable_seed(*parts: object) -> int:
    """Derive a 63-bit seed from the parts, stable across runs and platforms."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") >> 1


def atomic_write_json(path: str | Path, payload: object) -> None:
    """Write JSON to ``path`` via a temp file + rename."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def digest_of_file(path: str | Path) -> str:
    """Short content digest used in run manifests."""
    h = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return h[:16]
