# coding: utf-8

# # From schedule to training file
#
# This walkthrough builds a small dialogue-feedback corpus end to end with
# scripted backends, so it runs offline in a couple of seconds. Every step
# is the same call the CLI makes; the only difference is that the replies
# come from canned scripts instead of a hosted model.

import json
import tempfile
from pathlib import Path

from mate.backends import spec_from_dict
from mate.cases import load_sample_cases
from mate.datastore import DatasetStore, compute_stats, export_sft, split
from mate.dialogue import RunConfig, enumerate_jobs, per_job_backends, run_generation
from mate.guideline import load_default_guideline
from mate.vgr import VgrConfig, vgr_pass

workdir = Path(tempfile.mkdtemp(prefix="mate-demo-"))
print(f"working under {workdir}")

# ## The schedule
#
# Every client case is crossed with every guideline entry. The sample case
# file ships six clients, the guideline has sixteen entries, and we ask for
# one sample per combination, so the schedule holds 96 jobs. Each job gets
# a seed hashed from its key, which is what makes reruns byte-identical.

cases = load_sample_cases()
g = load_default_guideline()
cfg = RunConfig(min_turns=2, max_turns=3, samples_per_combo=1, master_seed=7)
jobs = enumerate_jobs(cases, g, cfg.samples_per_combo, cfg.master_seed)
print(f"{len(cases)} cases x {len(g.entries)} behaviors -> {len(jobs)} jobs")

# ## Scripted role-play
#
# The therapist and client scripts loop, so any dialogue length works. The
# supervisor script answers in the wire format the parser expects. With a
# hosted model you would swap these specs for kind "remote_endpoint".

dialogue_spec = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "therapist": [
                "Tell me more about what brought you in this week.",
                "You should simply stop worrying so much about it.",
                "What usually happens in your body when the worry starts?",
            ],
            "client": [
                "It has been a hard week; the deadline kept me up at night.",
                "Maybe. I suppose I could try that.",
                "My chest gets tight and I cannot focus on anything.",
            ],
        },
    }
)
supervisor_spec = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "supervisor": [
                'PROBLEMATIC_UTTERANCES:\n"You should simply stop worrying so much"\n'
                "CATEGORY: Premature Advice Giving\n"
                "FEEDBACK: Explore the worry before prescribing solutions."
            ]
        },
    }
)

store = DatasetStore(workdir / "store")
report = run_generation(jobs, cases, g, cfg, per_job_backends(dialogue_spec, supervisor_spec), store)
print(f"generation: {report.succeeded} succeeded, {report.failed} failed, {report.skipped} skipped")

# Six jobs failed on purpose: the guideline's exemplary entry schedules a
# clean session, and the generator refuses a supervisor reply that flags
# quotes in one. Failures are recorded with the job key and the reason, and
# failed jobs simply run again on the next invocation.

job_key, reason = report.failures[0]
print(f"first failure {job_key}: {reason}")

# Rerunning skips everything already on disk and retries the failures. With
# a supervisor script that answers NONE the exemplary jobs go through; the
# scheduled category always wins over whatever the script claims.

none_supervisor = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "supervisor": [
                "PROBLEMATIC_UTTERANCES:\nNONE\nCATEGORY: Exemplary Practice\n"
                "FEEDBACK: The therapist paced the session well."
            ]
        },
    }
)
resume = run_generation(jobs, cases, g, cfg, per_job_backends(dialogue_spec, none_supervisor), store)
print(f"resume:     {resume.succeeded} succeeded, {resume.skipped} skipped")

# ## Refinement
#
# The validator audits each record's feedback against a four-dimension
# checklist. Here the script passes everything on the first look, so all
# records come through unchanged. A failing audit would trigger up to
# n_retry rewrite attempts before escalating the record to human review.

validator_spec = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "validate": [
                "PROGRESSIVITY: PASS\nACTIONABILITY: PASS\n"
                "ETHICALITY: PASS\nSUPPORTIVENESS: PASS\nRATIONALE: fine"
            ]
        },
    }
)
pairs = store.current_pairs()
refined, vgr_report = vgr_pass(pairs, VgrConfig(validator=validator_spec, n_retry=3), g)
print(f"refinement: {vgr_report.as_dict()}")

# ## Stats, split, export
#
# The stats report mirrors what `mate stats` prints. The split is stratified
# by behavior category and retries seeds until every client id lands on both
# sides. The exported file holds one system/user/assistant example per line.

stats = compute_stats(refined)
print(json.dumps(stats.as_dict(), indent=2))

train, test = split(refined, test_fraction=0.25, seed=11)
print(f"split: {len(train)} train / {len(test)} test")

n = export_sft(train, g, workdir / "sft.jsonl")
first = json.loads((workdir / "sft.jsonl").read_text(encoding="utf-8").splitlines()[0])
print(f"exported {n} examples; first assistant message:")
print(first["messages"][2]["content"])
