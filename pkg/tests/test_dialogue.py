import random

import pytest

from conftest import (
    CLIENT_LINES,
    SUPERVISOR_NONE_REPLY,
    THERAPIST_LINES,
    scripted_spec,
)
from mate.backends import ScriptedBackend
from mate.datastore import DatasetStore
from mate.dialogue import (
    GenerationJob,
    RunConfig,
    enumerate_jobs,
    generate_dialogue,
    per_job_backends,
    run_generation,
)
from mate.errors import BackendError, ValidationError
from mate.util import stable_seed

SUPERVISOR_REPLY = (
    "PROBLEMATIC_UTTERANCES:\n"
    '"You should simply stop worrying so much"\n'
    "CATEGORY: Premature Advice Giving\n"
    "FEEDBACK:\n"
    "Explore the worry before prescribing solutions."
)


def _small_cfg(**overrides):
    base = dict(
        min_turns=2, max_turns=3, samples_per_combo=2, master_seed=7, concurrency=1
    )
    base.update(overrides)
    return RunConfig(**base)


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(min_turns=5, max_turns=4)
    with pytest.raises(ValidationError):
        RunConfig(min_turns=0, max_turns=4)
    with pytest.raises(ValidationError):
        RunConfig(samples_per_combo=0)
    with pytest.raises(ValidationError):
        RunConfig(concurrency=0)


def test_run_config_from_dict_filters_unknown_keys():
    cfg = RunConfig.from_dict({"min_turns": 2, "max_turns": 4, "mystery": True})
    assert cfg.min_turns == 2 and cfg.max_turns == 4


def test_enumerate_jobs_counts(cases, guideline):
    jobs = enumerate_jobs(cases, guideline, samples_per_combo=6, master_seed=0)
    assert len(jobs) == len(cases) * len(guideline) * 6
    assert len({j.key() for j in jobs}) == len(jobs)
    pairs = {(j.client_id, j.mistake_id) for j in jobs}
    assert len(pairs) == len(cases) * len(guideline)


def test_enumerate_jobs_seeds_are_stable(cases, guideline):
    a = enumerate_jobs(cases, guideline, samples_per_combo=2, master_seed=11)
    b = enumerate_jobs(cases, guideline, samples_per_combo=2, master_seed=11)
    assert a == b
    job = a[0]
    assert job.seed == stable_seed(11, job.client_id, job.mistake_id, job.sample_index)


def test_enumerate_jobs_differ_across_master_seeds(cases, guideline):
    a = enumerate_jobs(cases, guideline, samples_per_combo=1, master_seed=1)
    b = enumerate_jobs(cases, guideline, samples_per_combo=1, master_seed=2)
    assert [j.seed for j in a] != [j.seed for j in b]


def test_generate_dialogue_exchange_count_from_seed(cases, guideline):
    cfg = _small_cfg(min_turns=2, max_turns=5)
    case = cases.get("case-001")
    m = guideline.get(2)
    seed = stable_seed(cfg.master_seed, case.id, m.id, 1)
    expected = random.Random(seed).randint(2, 5)
    backend = ScriptedBackend(
        {"therapist": list(THERAPIST_LINES) * 3, "client": list(CLIENT_LINES) * 3}
    )
    dialogue = generate_dialogue(case, m, cfg, backend, sample_index=1)
    assert dialogue.exchange_count() == expected
    assert dialogue.generator_meta["target_exchanges"] == expected
    assert dialogue.generator_meta["seed"] == seed
    assert dialogue.dialogue_id == "case-001__m02__s1"


def test_generate_dialogue_failure_attaches_partial_transcript(cases, guideline):
    cfg = _small_cfg()
    backend = ScriptedBackend(
        {
            "therapist": [THERAPIST_LINES[0], THERAPIST_LINES[1]],
            "client": [CLIENT_LINES[0], {"$error": "mid-run outage"}],
        }
    )
    with pytest.raises(BackendError, match="outage") as exc_info:
        generate_dialogue(cases.get("case-001"), guideline.get(2), cfg, backend)
    partial = exc_info.value.partial_transcript
    assert partial.startswith("[1] therapist: ")
    assert CLIENT_LINES[0] in partial


def _factory_for(cases, guideline):
    dialogue_spec = scripted_spec(
        {"therapist": list(THERAPIST_LINES), "client": list(CLIENT_LINES)}, loop=True
    )
    supervisor_spec = scripted_spec({"supervisor": [SUPERVISOR_NONE_REPLY]}, loop=True)
    return per_job_backends(dialogue_spec, supervisor_spec)


def test_run_generation_writes_all_jobs(tmp_path, cases, guideline):
    cfg = _small_cfg(samples_per_combo=1)
    jobs = enumerate_jobs(cases, guideline, cfg.samples_per_combo, cfg.master_seed)
    store = DatasetStore(tmp_path / "data")
    report = run_generation(
        jobs, cases, guideline, cfg, _factory_for(cases, guideline), store
    )
    assert report.succeeded == len(jobs)
    assert report.failed == 0 and report.skipped == 0
    assert len(store.keys()) == len(jobs)


def test_run_generation_resumes_by_skipping_existing(tmp_path, cases, guideline):
    cfg = _small_cfg(samples_per_combo=1)
    jobs = enumerate_jobs(cases, guideline, cfg.samples_per_combo, cfg.master_seed)
    store = DatasetStore(tmp_path / "data")
    factory = _factory_for(cases, guideline)
    run_generation(jobs[:5], cases, guideline, cfg, factory, store)
    report = run_generation(jobs, cases, guideline, cfg, factory, store)
    assert report.skipped == 5
    assert report.succeeded == len(jobs) - 5
    assert len(store.keys()) == len(jobs)


def test_run_generation_byte_stable_across_concurrency(tmp_path, cases, guideline):
    outputs = []
    for workers in (1, 4):
        cfg = _small_cfg(samples_per_combo=1, concurrency=workers)
        jobs = enumerate_jobs(cases, guideline, cfg.samples_per_combo, cfg.master_seed)
        root = tmp_path / f"w{workers}"
        store = DatasetStore(root)
        run_generation(jobs, cases, guideline, cfg, _factory_for(cases, guideline), store)
        outputs.append((root / "dataset.jsonl").read_bytes())
    assert outputs[0] == outputs[1]


def test_run_generation_records_failures_and_continues(tmp_path, cases, guideline):
    cfg = _small_cfg(samples_per_combo=1)
    jobs = enumerate_jobs(cases, guideline, 1, cfg.master_seed)[:3]

    calls = {"n": 0}

    def flaky_factory(job: GenerationJob):
        calls["n"] += 1
        if calls["n"] == 2:
            dialogue = ScriptedBackend({"therapist": [{"$error": "boom"}]})
        else:
            dialogue = ScriptedBackend(
                {"therapist": list(THERAPIST_LINES), "client": list(CLIENT_LINES)},
                loop=True,
            )
        supervisor = ScriptedBackend({"supervisor": [SUPERVISOR_NONE_REPLY]}, loop=True)
        return dialogue, supervisor

    store = DatasetStore(tmp_path / "data")
    report = run_generation(jobs, cases, guideline, cfg, flaky_factory, store)
    assert report.succeeded == 2
    assert report.failed == 1
    assert report.failures[0][0] == jobs[1].key()
    assert "boom" in report.failures[0][1]


def test_report_as_dict_shape():
    from mate.dialogue import RunReport

    report = RunReport(succeeded=2, failed=1, skipped=3)
    report.failures.append((("c", 1, 1), "why"))
    as_dict = report.as_dict()
    assert as_dict["succeeded"] == 2
    assert as_dict["failures"] == [{"job": ["c", 1, 1], "reason": "why"}]
