"""Dialogue orchestration and the cross-combination generation run.

Every (client case, guideline behavior) pair is sampled a configurable
number of times; each job gets a seed derived from the master seed so runs
are reproducible and resumable. Dialogues alternate therapist/client turns,
therapist first, with the exchange count drawn per job from the seed.
"""

from __future__ import annotations

import random
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field

from .agents import TEMPLATE_VERSION, client_turn, supervise, therapist_turn
from .backends import ChatBackend, ChatBackendSpec, build_backend
from .cases import CaseSet, ClientCase
from .errors import MateError, ValidationError
from .guideline import Guideline, MistakeSpec
from .records import DataPair, DialogueRecord, Utterance
from .util import now_iso, stable_seed

# Drawn uniformly per job; [10, 14] reproduces a ~12-exchange average.
DEFAULT_MIN_TURNS = 10
DEFAULT_MAX_TURNS = 14


@dataclass(frozen=True)
class RunConfig:
    min_turns: int = DEFAULT_MIN_TURNS
    max_turns: int = DEFAULT_MAX_TURNS
    samples_per_combo: int = 6
    master_seed: int = 0
    concurrency: int = 1
    supervise_max_retries: int = 2

    def __post_init__(self):
        if not (1 <= self.min_turns <= self.max_turns):
            raise ValidationError("need 1 <= min_turns <= max_turns")
        if self.samples_per_combo < 1:
            raise ValidationError("samples_per_combo must be >= 1")
        if self.concurrency < 1:
            raise ValidationError("concurrency must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in raw.items() if k in known})


@dataclass(frozen=True)
class GenerationJob:
    client_id: str
    mistake_id: int
    sample_index: int
    seed: int

    def key(self) -> tuple[str, int, int]:
        return (self.client_id, self.mistake_id, self.sample_index)

    def dialogue_id(self) -> str:
        return f"{self.client_id}__m{self.mistake_id:02d}__s{self.sample_index}"


@dataclass
class RunReport:
    succeeded: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list[tuple[tuple[str, int, int], str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "succeeded": self.succeeded,
            "failed": self.failed,
            "skipped": self.skipped,
            "failures": [
                {"job": list(key), "reason": reason} for key, reason in self.failures
            ],
        }


def enumerate_jobs(
    cases: CaseSet, g: Guideline, samples_per_combo: int, master_seed: int
) -> list[GenerationJob]:
    """Full cross-combination schedule: |cases| x |guideline| x samples jobs.

    Each job's seed is a stable hash of (master_seed, client, behavior,
    sample) so the schedule is identical across runs, resumes, and worker
    counts.
    """
    if samples_per_combo < 1:
        raise ValidationError("samples_per_combo must be >= 1")
    jobs = []
    for case in cases.cases:
        for m in g.entries:
            for s in range(1, samples_per_combo + 1):
                jobs.append(
                    GenerationJob(
                        client_id=case.id,
                        mistake_id=m.id,
                        sample_index=s,
                        seed=stable_seed(master_seed, case.id, m.id, s),
                    )
                )
    return jobs


def generate_dialogue(
    case: ClientCase,
    m: MistakeSpec,
    cfg: RunConfig,
    backend: ChatBackend,
    sample_index: int = 1,
    seed: int | None = None,
) -> DialogueRecord:
    """Run one therapist-client dialogue to completion.

    The target exchange count is drawn uniformly from [min_turns, max_turns]
    using the job seed. A backend failure mid-dialogue raises with the partial
    transcript attached for diagnostics; partial dialogues are never returned.
    """
    if seed is None:
        seed = stable_seed(cfg.master_seed, case.id, m.id, sample_index)
    exchanges = random.Random(seed).randint(cfg.min_turns, cfg.max_turns)
    turns: list[Utterance] = []
    try:
        for _ in range(exchanges):
            turns.append(therapist_turn(turns, m, backend))
            turns.append(client_turn(turns, case, backend))
    except MateError as exc:
        partial = "\n".join(f"[{u.turn_index}] {u.role}: {u.text}" for u in turns)
        exc.partial_transcript = partial
        raise
    return DialogueRecord(
        dialogue_id=f"{case.id}__m{m.id:02d}__s{sample_index}",
        client_id=case.id,
        mistake_id=m.id,
        sample_index=sample_index,
        turns=tuple(turns),
        created_at=now_iso(),
        generator_meta={
            "seed": seed,
            "target_exchanges": exchanges,
            "template_version": TEMPLATE_VERSION,
        },
    )


def per_job_backends(dialogue_spec: ChatBackendSpec, supervisor_spec: ChatBackendSpec):
    """Backend factory for run_generation.

    Scripted backends are rebuilt per job (scripts restart from the top), so
    output does not depend on scheduling order. Remote backends are shared.
    """
    shared: dict[int, ChatBackend] = {}

    def factory(job: GenerationJob) -> tuple[ChatBackend, ChatBackend]:
        built = []
        for i, spec in enumerate((dialogue_spec, supervisor_spec)):
            if spec.kind == "scripted":
                built.append(build_backend(spec))
            else:
                if i not in shared:
                    shared[i] = build_backend(spec)
                built.append(shared[i])
        return built[0], built[1]

    return factory


def _run_job(
    job: GenerationJob,
    case: ClientCase,
    m: MistakeSpec,
    cfg: RunConfig,
    factory,
) -> DataPair:
    dialogue_backend, supervisor_backend = factory(job)
    dialogue = generate_dialogue(
        case, m, cfg, dialogue_backend, sample_index=job.sample_index, seed=job.seed
    )
    feedback = supervise(
        dialogue, m, supervisor_backend, max_retries=cfg.supervise_max_retries
    )
    return DataPair(dialogue=dialogue, feedback=feedback)


def run_generation(
    jobs: list[GenerationJob],
    cases: CaseSet,
    g: Guideline,
    cfg: RunConfig,
    factory,
    store,
) -> RunReport:
    """Execute jobs against the backends and persist finished pairs.

    Already-persisted job keys are skipped, so an interrupted run resumes by
    rerunning the same command. Jobs execute on a bounded worker pool but
    results are appended in job order, keeping the dataset file byte-stable
    across worker counts. Failed jobs are recorded and retried on rerun.
    """
    report = RunReport()
    existing = store.keys()
    pending: list[GenerationJob] = []
    for job in jobs:
        if job.key() in existing:
            report.skipped += 1
        else:
            pending.append(job)

    def submit(pool: ThreadPoolExecutor, job: GenerationJob) -> Future:
        return pool.submit(_run_job, job, cases.get(job.client_id), g.get(job.mistake_id), cfg, factory)

    with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
        futures = [(job, submit(pool, job)) for job in pending]
        for job, future in futures:
            try:
                pair = future.result()
            except MateError as exc:
                report.failed += 1
                report.failures.append((job.key(), str(exc)))
                continue
            store.append(pair)
            report.succeeded += 1
    return report
