"""Dataset persistence, curation, statistics, SFT export, and review queue.

Storage is append-only JSONL, one flattened record per line, with a sidecar
key index for cheap resume. Rewrites (review resolutions) append a new line
for the same job key; the latest line per key is the current record.
"""

from __future__ import annotations

import json
import threading
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from .agents import format_supervisor_output, load_template
from .errors import ConflictError, FormatError, NotFoundError, ValidationError
from .guideline import Guideline
from .records import DataPair, RefinementStatus, pair_from_wire, pair_to_wire
from .util import now_iso

import random

DATA_FILE = "dataset.jsonl"
INDEX_FILE = "dataset.index"
REVIEWS_FILE = "reviews.jsonl"


@dataclass(frozen=True)
class StatsReport:
    total_records: int
    unique_client_ids: int
    behavior_categories: int
    refinement_status_counts: dict[str, int]
    avg_feedback_chars: float
    avg_dialogue_turns: float
    avg_utterance_length_chars: float
    avg_labeled_problematic_utterances: float

    def as_dict(self) -> dict:
        return {
            "total_records": self.total_records,
            "unique_client_ids": self.unique_client_ids,
            "behavior_categories": self.behavior_categories,
            "refinement_status_counts": dict(self.refinement_status_counts),
            "avg_feedback_chars": self.avg_feedback_chars,
            "avg_dialogue_turns": self.avg_dialogue_turns,
            "avg_utterance_length_chars": self.avg_utterance_length_chars,
            "avg_labeled_problematic_utterances": self.avg_labeled_problematic_utterances,
        }


@dataclass(frozen=True)
class ReviewItem:
    dialogue_id: str
    flagged_reason: str
    expert_feedback: str | None = None
    reviewer_id: str | None = None
    resolved: bool = False
    created_at: str = ""
    resolved_at: str | None = None

    def as_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "flagged_reason": self.flagged_reason,
            "expert_feedback": self.expert_feedback,
            "reviewer_id": self.reviewer_id,
            "resolved": self.resolved,
            "created_at": self.created_at,
            "resolved_at": self.resolved_at,
        }


class DatasetStore:
    """Append-only JSONL store for dialogue-feedback records.

    The append path is serialized by a lock; readers see only fully written
    lines. Review mutations are compare-and-set on the resolved flag.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.data_path = self.root / DATA_FILE
        self.index_path = self.root / INDEX_FILE
        self.reviews_path = self.root / REVIEWS_FILE
        self._lock = threading.RLock()

    # -- records ---------------------------------------------------------

    def append(self, pair: DataPair) -> None:
        line = json.dumps(pair_to_wire(pair), ensure_ascii=False)
        key = pair.key()
        with self._lock:
            with self.data_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
            with self.index_path.open("a", encoding="utf-8") as fh:
                fh.write("\t".join(str(p) for p in key) + "\n")

    def keys(self) -> set[tuple[str, int, int]]:
        """Job keys already persisted (sidecar fast path, data-file fallback)."""
        with self._lock:
            if not self.data_path.exists():
                return set()
            data_lines = sum(1 for _ in self.data_path.open(encoding="utf-8"))
            if self.index_path.exists():
                rows = self.index_path.read_text(encoding="utf-8").splitlines()
                if len(rows) == data_lines:
                    out = set()
                    for row in rows:
                        client_id, mistake_id, sample_index = row.split("\t")
                        out.add((client_id, int(mistake_id), int(sample_index)))
                    return out
            return {
                (r["client_id"], int(r["mistake_id"]), int(r["sample_index"]))
                for r in self.load_raw()
            }

    def load_raw(self) -> list[dict]:
        """All record lines as decoded JSON, duplicates included, in file order."""
        if not self.data_path.exists():
            return []
        out = []
        with self.data_path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{self.data_path}: line {lineno}: {exc.msg}")
        return out

    def current_pairs(self) -> list[DataPair]:
        """Latest record per job key, parsed and validated, in first-seen order."""
        return [pair_from_wire(raw) for raw in dedupe_raw(self.load_raw())]

    def get_pair(self, dialogue_id: str) -> DataPair:
        for pair in self.current_pairs():
            if pair.dialogue.dialogue_id == dialogue_id:
                return pair
        raise NotFoundError(f"no record with dialogue_id {dialogue_id!r}")

    # -- review queue ----------------------------------------------------

    def _append_review(self, item: ReviewItem) -> None:
        with self.reviews_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(item.as_dict(), ensure_ascii=False) + "\n")

    def _load_reviews(self) -> dict[str, ReviewItem]:
        items: dict[str, ReviewItem] = {}
        if not self.reviews_path.exists():
            return items
        with self.reviews_path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                items[raw["dialogue_id"]] = ReviewItem(**raw)
        return items

    def enqueue_review(self, pair: DataPair, reason: str = "vgr_escalation") -> ReviewItem:
        if pair.feedback.refinement_status is not RefinementStatus.NEED_HUMAN:
            raise ValidationError(
                f"{pair.dialogue.dialogue_id}: only need_human records enter review"
            )
        with self._lock:
            existing = self._load_reviews().get(pair.dialogue.dialogue_id)
            if existing is not None:
                return existing
            item = ReviewItem(
                dialogue_id=pair.dialogue.dialogue_id,
                flagged_reason=reason,
                created_at=now_iso(),
            )
            self._append_review(item)
            return item

    def list_review(self, include_resolved: bool = False) -> list[ReviewItem]:
        with self._lock:
            items = list(self._load_reviews().values())
        if not include_resolved:
            items = [i for i in items if not i.resolved]
        return sorted(items, key=lambda i: i.dialogue_id)

    def resolve_review(
        self, dialogue_id: str, expert_feedback: str, reviewer_id: str
    ) -> ReviewItem:
        """Apply expert feedback: the record becomes status=manual.

        This is the only path from need_human back to a usable record.
        """
        if not expert_feedback.strip():
            raise ValidationError("expert_feedback must be non-empty")
        with self._lock:
            items = self._load_reviews()
            item = items.get(dialogue_id)
            if item is None:
                raise NotFoundError(f"no review item for {dialogue_id!r}")
            if item.resolved:
                raise ConflictError(f"review item {dialogue_id!r} already resolved")
            pair = self.get_pair(dialogue_id)
            updated_feedback = replace(
                pair.feedback,
                feedback_text=expert_feedback,
                refinement_status=RefinementStatus.MANUAL,
            )
            self.append(pair.with_feedback(updated_feedback))
            resolved = replace(
                item,
                expert_feedback=expert_feedback,
                reviewer_id=reviewer_id,
                resolved=True,
                resolved_at=now_iso(),
            )
            self._append_review(resolved)
            return resolved


# -- curation ------------------------------------------------------------


def dedupe_raw(rows: list[dict]) -> list[dict]:
    """Collapse duplicate job keys to the last-written row, first-seen order."""
    latest: dict[tuple, dict] = {}
    order: list[tuple] = []
    for raw in rows:
        key = (raw.get("client_id"), raw.get("mistake_id"), raw.get("sample_index"))
        if key not in latest:
            order.append(key)
        latest[key] = raw
    return [latest[k] for k in order]


def clean(records: list) -> tuple[list[DataPair], int]:
    """Drop records violating structural invariants; keep valid escalations.

    Accepts raw wire dicts or already-parsed DataPairs, so cleaning an
    already-clean list is the identity.
    """
    kept: list[DataPair] = []
    filtered = 0
    for record in records:
        if isinstance(record, DataPair):
            kept.append(record)
            continue
        try:
            kept.append(pair_from_wire(record))
        except (FormatError, ValidationError):
            filtered += 1
    return kept, filtered


def split(
    records: list[DataPair], test_fraction: float, seed: int
) -> tuple[list[DataPair], list[DataPair]]:
    """Stratified train/test split by behavior category.

    Within each category the test share is round(fraction * n), clamped so
    both splits keep the category. Seeds are retried deterministically
    (seed, seed+1, ...) until every client id also lands in both splits.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValidationError("test_fraction must be in (0, 1)")
    by_category: dict[int, list[DataPair]] = {}
    for record in records:
        by_category.setdefault(record.feedback.category_id, []).append(record)
    for category_id, members in by_category.items():
        if len(members) < 2:
            raise ValidationError(
                f"category {category_id} has {len(members)} record(s); "
                "cannot appear in both splits"
            )
    all_clients = {r.dialogue.client_id for r in records}
    for attempt in range(100):
        rng = random.Random(seed + attempt)
        train: list[DataPair] = []
        test: list[DataPair] = []
        for category_id in sorted(by_category):
            members = list(by_category[category_id])
            rng.shuffle(members)
            k = round(test_fraction * len(members))
            k = max(1, min(k, len(members) - 1))
            test.extend(members[:k])
            train.extend(members[k:])
        if (
            {r.dialogue.client_id for r in train} == all_clients
            and {r.dialogue.client_id for r in test} == all_clients
        ):
            return train, test
    raise ValidationError(
        "no seed within 100 attempts places every client id in both splits"
    )


def compute_stats(records: list[DataPair], filtered_count: int = 0) -> StatsReport:
    """Corpus statistics; dialogue turns count therapist-client exchange pairs
    and utterance length is measured in characters."""
    if not records:
        return StatsReport(0, 0, 0, {"filtered": filtered_count}, 0.0, 0.0, 0.0, 0.0)
    status_counts = Counter(r.feedback.refinement_status.value for r in records)
    status_counts["filtered"] = filtered_count
    for status in RefinementStatus:
        status_counts.setdefault(status.value, 0)
    with_text = [r for r in records if r.feedback.feedback_text is not None]
    all_turns = [u for r in records for u in r.dialogue.turns]
    return StatsReport(
        total_records=len(records),
        unique_client_ids=len({r.dialogue.client_id for r in records}),
        behavior_categories=len({r.feedback.category_id for r in records}),
        refinement_status_counts=dict(status_counts),
        avg_feedback_chars=(
            sum(len(r.feedback.feedback_text) for r in with_text) / len(with_text)
            if with_text
            else 0.0
        ),
        avg_dialogue_turns=sum(r.dialogue.exchange_count() for r in records)
        / len(records),
        avg_utterance_length_chars=(
            sum(len(u.text) for u in all_turns) / len(all_turns) if all_turns else 0.0
        ),
        avg_labeled_problematic_utterances=sum(
            len(r.feedback.problematic_turns) for r in records
        )
        / len(records),
    )


def export_sft(records: list[DataPair], g: Guideline, out: str | Path) -> int:
    """Write one system/user/assistant training example per record.

    The assistant message is the supervisor wire format, so exported examples
    parse back losslessly through parse_supervisor_output. Records awaiting
    human review cannot be exported.
    """
    unresolved = [
        r.dialogue.dialogue_id
        for r in records
        if r.feedback.refinement_status is RefinementStatus.NEED_HUMAN
    ]
    if unresolved:
        raise ValidationError(
            f"records awaiting human review cannot be exported: {sorted(unresolved)}"
        )
    system_prompt = load_template("sft_system").format(guideline_digest=g.digest())
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with out.open("w", encoding="utf-8") as fh:
        for record in sorted(records, key=lambda r: r.dialogue.dialogue_id):
            example = {
                "messages": [
                    {"role": "system", "content": system_prompt},
                    {"role": "user", "content": record.dialogue.transcript()},
                    {
                        "role": "assistant",
                        "content": format_supervisor_output(record.feedback, g),
                    },
                ]
            }
            fh.write(json.dumps(example, ensure_ascii=False) + "\n")
            count += 1
    return count


def cohen_kappa(labels_a: list, labels_b: list) -> float:
    """Chance-corrected agreement between two raters over the same items."""
    if len(labels_a) != len(labels_b):
        raise ValidationError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise ValidationError("label lists must be non-empty")
    n = len(labels_a)
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    expected = sum(
        (counts_a[label] / n) * (counts_b[label] / n) for label in counts_a
    )
    if expected >= 1.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)
