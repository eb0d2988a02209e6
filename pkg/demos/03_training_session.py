# coding: utf-8

# # A live training session over HTTP
#
# The service hosts timed practice sessions: a trainee plays therapist, a
# scripted client answers, and on finish a supervisor reviews the transcript
# and returns structured feedback. This script drives the real FastAPI app
# in process; point the same requests at `mate serve` and nothing changes.

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from mate.backends import spec_from_dict
from mate.cases import load_sample_cases
from mate.datastore import DatasetStore
from mate.guideline import load_default_guideline
from mate.service import TrainingService, create_app

client_spec = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "client": [
                "It has been a hard week; the deadline kept me up at night.",
                "Maybe. I suppose I could try that.",
                "My chest gets tight and I cannot focus on anything.",
            ]
        },
    }
)
supervisor_spec = spec_from_dict(
    {
        "kind": "scripted",
        "loop": True,
        "scripts": {
            "locate": ['"You should simply stop worrying so much"'],
            "classify": ["Premature Advice Giving"],
            "feedback": ["Hold the advice until the worry has been explored."],
        },
    }
)

workdir = Path(tempfile.mkdtemp(prefix="mate-session-"))
service = TrainingService(
    load_sample_cases(),
    load_default_guideline(),
    client_spec,
    supervisor_spec,
    DatasetStore(workdir / "store"),
)
http = TestClient(create_app(service))

# ## Pick a case, open a session
#
# Sessions carry a countdown and a turn budget; both come back on every
# view so a UI can render them without extra calls.

cases = http.get("/api/cases").json()
print(f"{len(cases)} cases; first: {cases[0]['id']} ({cases[0]['name']})")

session = http.post("/api/sessions", json={"case_id": cases[0]["id"]}).json()
sid = session["session_id"]
print(f"session {sid}: {session['remaining_seconds']:.0f}s, {session['remaining_turns']} turns left")

# ## Confidence before feedback
#
# The questionnaire takes eight ratings from 1 to 6. Submitting the
# before_feedback phase freezes the chat; the session moves to
# awaiting_feedback and only finish is legal from there.

http.post(f"/api/sessions/{sid}/cases-r", json={"phase": "before_feedback", "ratings": [3] * 8})

# Oops, wrong order on purpose: the questionnaire belongs after the chat.
# The service refuses the late message with a structured error envelope.
late = http.post(f"/api/sessions/{sid}/messages", json={"text": "Hello?"})
print(f"message after questionnaire -> {late.status_code} {late.json()['error']['code']}")

# Start over and run the session in the intended order.
session = http.post("/api/sessions", json={"case_id": cases[0]["id"]}).json()
sid = session["session_id"]
for text in (
    "You should simply stop worrying so much about it.",
    "What usually happens in your body when the worry starts?",
    "Tell me more about what brought you in this week.",
):
    reply = http.post(f"/api/sessions/{sid}/messages", json={"text": text}).json()
    print(f"[trainee] {text}")
    print(f"[client]  {reply['text']}")

http.post(f"/api/sessions/{sid}/cases-r", json={"phase": "before_feedback", "ratings": [3] * 8})

# ## Finish: the supervisor reads the transcript
#
# The feedback names the flagged turns so a UI can highlight them inline.

feedback = http.post(f"/api/sessions/{sid}/finish").json()
print(json.dumps(feedback, indent=2))

http.post(f"/api/sessions/{sid}/cases-r", json={"phase": "after_feedback", "ratings": [5] * 8})
print(f"state: {http.get(f'/api/sessions/{sid}').json()['state']}")

# ## Self-efficacy movement
#
# Once at least two sessions carry both questionnaire phases the report
# compares before and after ratings item by item with a paired bootstrap.
# One more quick session gets us over that threshold.

session = http.post("/api/sessions", json={"case_id": cases[1]["id"]}).json()
sid2 = session["session_id"]
http.post(f"/api/sessions/{sid2}/messages", json={"text": "You should simply stop worrying so much about it."})
http.post(f"/api/sessions/{sid2}/cases-r", json={"phase": "before_feedback", "ratings": [2] * 8})
http.post(f"/api/sessions/{sid2}/finish")
http.post(f"/api/sessions/{sid2}/cases-r", json={"phase": "after_feedback", "ratings": [4] * 8})

report = http.get("/api/reports/self-efficacy").json()
print(f"self-efficacy over {report['n_pairs']} paired sessions:")
for item in report["items"][:3]:
    print(
        f"  {item['item_id']:<12} {item['before_mean']:.1f} -> {item['after_mean']:.1f}"
        f"  (diff {item['mean_diff']:+.2f}, CI [{item['ci_low']:+.2f}, {item['ci_high']:+.2f}])"
    )

# ## The review queue
#
# Completed sessions land in the dataset store like any synthesized record.
# Escalated records wait in the review queue until an expert writes the
# feedback by hand; resolving one flips its status to manual.

queue = http.get("/api/review").json()
print(f"review queue: {len(queue)} item(s)")
