"""HTTP service for live trainee sessions, questionnaires, and expert review.

A trainee plays the therapist against the simulated client, optionally rates
their confidence before seeing feedback, finishes to receive supervisor
feedback over the transcript, then rates confidence again. Escalated dataset
records surface through the review endpoints.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .agents import client_turn
from .backends import ChatBackend, ChatBackendSpec, build_backend
from .cases import CaseSet, ClientCase
from .datastore import DatasetStore
from .errors import (
    BackendError,
    ConflictError,
    FormatError,
    MateError,
    NotFoundError,
    ParseError,
    StateError,
    ValidationError,
)
from .evaluate.bootstrap import paired_bootstrap_ci
from .evaluate.inference import SENTINEL_CATEGORY, run_supervision_inference
from .guideline import Guideline
from .records import (
    THERAPIST,
    DialogueRecord,
    RefinementStatus,
    SupervisionFeedback,
    Utterance,
)
from .util import now_epoch, now_iso

DEFAULT_TIME_LIMIT_SECONDS = 15 * 60
DEFAULT_TURN_LIMIT = 20

PHASE_BEFORE = "before_feedback"
PHASE_AFTER = "after_feedback"

# Eight helping-skill confidence items (exploration-insight and action
# subscales), each rated 1 (no confidence) to 6 (complete confidence).
CASES_R_ITEMS = (
    "attending",
    "restatement",
    "open_questions",
    "reflection_of_feelings",
    "challenges",
    "interpretations",
    "information_giving",
    "direct_guidance",
)

SESSIONS_FILE = "sessions.jsonl"
CASES_R_FILE = "cases_r.jsonl"

_ERROR_STATUS = {
    ValidationError: (400, "validation_error"),
    FormatError: (400, "format_error"),
    NotFoundError: (404, "not_found"),
    StateError: (409, "state_error"),
    ConflictError: (409, "conflict"),
    ParseError: (502, "parse_error"),
    BackendError: (502, "backend_error"),
}


@dataclass
class Session:
    session_id: str
    case_id: str
    state: str
    turns: list[Utterance]
    started_at: str
    started_epoch: float
    time_limit_seconds: int
    turn_limit: int
    feedback: SupervisionFeedback | None = None
    finished_at: str | None = None
    cases_r: dict[str, dict] = field(default_factory=dict)

    def trainee_turn_count(self) -> int:
        return sum(1 for u in self.turns if u.role == THERAPIST)

    def remaining_seconds(self) -> float:
        if self.state != "active":
            return 0.0
        return max(0.0, self.time_limit_seconds - (now_epoch() - self.started_epoch))

    def remaining_turns(self) -> int:
        return max(0, self.turn_limit - self.trainee_turn_count())


def _feedback_wire(feedback: SupervisionFeedback, g: Guideline) -> dict:
    if feedback.category_id == SENTINEL_CATEGORY:
        category_name = ""
    else:
        category_name = g.get(feedback.category_id).category_name
    return {
        "problematic_turns": sorted(feedback.problematic_turns),
        "problematic_quotes": list(feedback.problematic_quotes),
        "category_id": feedback.category_id,
        "category_name": category_name,
        "feedback_text": feedback.feedback_text,
        "refinement_status": feedback.refinement_status.value,
    }


class TrainingService:
    """Session state machine plus persistence. One lock per session."""

    def __init__(
        self,
        cases: CaseSet,
        g: Guideline,
        client_backend: ChatBackendSpec,
        supervisor_backend: ChatBackendSpec,
        store: DatasetStore,
        time_limit_seconds: int = DEFAULT_TIME_LIMIT_SECONDS,
        turn_limit: int = DEFAULT_TURN_LIMIT,
        bootstrap_resamples: int = 10000,
        bootstrap_seed: int = 0,
    ):
        self.cases = cases
        self.guideline = g
        self.client_spec = client_backend
        self.supervisor_spec = supervisor_backend
        self.store = store
        self.default_time_limit = time_limit_seconds
        self.default_turn_limit = turn_limit
        self.bootstrap_resamples = bootstrap_resamples
        self.bootstrap_seed = bootstrap_seed
        self._sessions: dict[str, Session] = {}
        self._client_backends: dict[str, ChatBackend] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._sessions_path = store.root / SESSIONS_FILE
        self._cases_r_path = store.root / CASES_R_FILE

    # -- persistence -----------------------------------------------------

    def _persist_session(self, session: Session) -> None:
        snapshot = {
            "session_id": session.session_id,
            "case_id": session.case_id,
            "state": session.state,
            "turns": [
                {"turn_index": u.turn_index, "role": u.role, "text": u.text}
                for u in session.turns
            ],
            "started_at": session.started_at,
            "time_limit_seconds": session.time_limit_seconds,
            "turn_limit": session.turn_limit,
            "feedback": (
                _feedback_wire(session.feedback, self.guideline)
                if session.feedback
                else None
            ),
            "finished_at": session.finished_at,
        }
        with self._sessions_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(snapshot, ensure_ascii=False) + "\n")

    def _persist_cases_r(self, record: dict) -> None:
        with self._cases_r_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    # -- session registry --------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"no session {session_id!r}")
        return session

    def _check_expiry(self, session: Session) -> None:
        if (
            session.state == "active"
            and now_epoch() - session.started_epoch > session.time_limit_seconds
        ):
            session.state = "expired"
            self._persist_session(session)

    # -- operations --------------------------------------------------------

    def create_session(
        self,
        case_id: str,
        time_limit_seconds: int | None = None,
        turn_limit: int | None = None,
    ) -> Session:
        self.cases.get(case_id)  # not-found check
        time_limit = (
            self.default_time_limit if time_limit_seconds is None else time_limit_seconds
        )
        limit = self.default_turn_limit if turn_limit is None else turn_limit
        if time_limit < 0 or limit < 1:
            raise ValidationError("limits must be non-negative (turn limit >= 1)")
        session = Session(
            session_id=uuid.uuid4().hex,
            case_id=case_id,
            state="active",
            turns=[],
            started_at=now_iso(),
            started_epoch=now_epoch(),
            time_limit_seconds=time_limit,
            turn_limit=limit,
        )
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
            self._client_backends[session.session_id] = build_backend(self.client_spec)
        self._persist_session(session)
        return session

    def get_session(self, session_id: str) -> Session:
        with self._lock_for(session_id):
            session = self._session(session_id)
            self._check_expiry(session)
            return session

    def post_message(self, session_id: str, text: str) -> Utterance:
        """Append the trainee's therapist turn and return the client reply."""
        if not text or not text.strip():
            raise ValidationError("message text must be non-empty")
        with self._lock_for(session_id):
            session = self._session(session_id)
            self._check_expiry(session)
            if session.state != "active":
                raise StateError(f"session is {session.state}")
            if session.trainee_turn_count() >= session.turn_limit:
                raise StateError(
                    f"turn limit of {session.turn_limit} trainee messages reached"
                )
            case = self.cases.get(session.case_id)
            trainee = Utterance(
                turn_index=len(session.turns) + 1, role=THERAPIST, text=text.strip()
            )
            history = session.turns + [trainee]
            reply = client_turn(
                history, case, self._client_backends[session.session_id]
            )
            session.turns.extend([trainee, reply])
            self._persist_session(session)
            return reply

    def finish_session(self, session_id: str) -> Session:
        """Run non-omniscient supervision over the transcript; completes once.

        Expired sessions may still finish once, so a trainee who ran out the
        clock still receives feedback.
        """
        with self._lock_for(session_id):
            session = self._session(session_id)
            self._check_expiry(session)
            if session.state == "completed":
                raise StateError("session is completed")
            if session.trainee_turn_count() < 1:
                raise ValidationError("cannot finish a session with no trainee turns")
            dialogue = DialogueRecord(
                dialogue_id=session.session_id,
                client_id=session.case_id,
                mistake_id=0,
                sample_index=0,
                turns=tuple(session.turns),
                created_at=session.started_at,
                generator_meta={"source": "live_session"},
            )
            pred = run_supervision_inference(
                self.supervisor_spec, dialogue, self.guideline
            )
            therapist_indices = {u.turn_index for u in dialogue.therapist_turns()}
            session.feedback = SupervisionFeedback(
                problematic_turns=frozenset(
                    i for i in pred.problematic_turns if i in therapist_indices
                ),
                problematic_quotes=(),
                category_id=pred.category_id,
                feedback_text=pred.feedback_text or "(no feedback produced)",
                refinement_status=RefinementStatus.NONE,
            )
            session.state = "completed"
            session.finished_at = now_iso()
            self._persist_session(session)
            return session

    def submit_cases_r(
        self,
        session_id: str,
        phase: str,
        ratings: list[int],
        item_ids: list[str] | None = None,
    ) -> dict:
        if phase not in (PHASE_BEFORE, PHASE_AFTER):
            raise ValidationError(f"unknown phase {phase!r}")
        if len(ratings) != len(CASES_R_ITEMS):
            raise ValidationError(f"expected {len(CASES_R_ITEMS)} ratings")
        if any(not isinstance(r, int) or not 1 <= r <= 6 for r in ratings):
            raise ValidationError("each rating must be an integer in [1, 6]")
        items = list(item_ids) if item_ids else list(CASES_R_ITEMS)
        if len(items) != len(CASES_R_ITEMS) or len(set(items)) != len(items):
            raise ValidationError(f"item_ids must be {len(CASES_R_ITEMS)} unique ids")
        with self._lock_for(session_id):
            session = self._session(session_id)
            self._check_expiry(session)
            if phase in session.cases_r:
                raise ConflictError(f"phase {phase} already submitted")
            if phase == PHASE_BEFORE:
                if session.state not in ("active", "awaiting_feedback"):
                    raise StateError(f"session is {session.state}")
                if session.state == "active":
                    session.state = "awaiting_feedback"
            else:
                if session.state != "completed":
                    raise StateError(f"session is {session.state}")
            record = {
                "session_id": session_id,
                "phase": phase,
                "ratings": list(ratings),
                "item_ids": items,
                "submitted_at": now_iso(),
            }
            session.cases_r[phase] = record
            self._persist_cases_r(record)
            self._persist_session(session)
            return record

    def self_efficacy_summary(self) -> dict:
        """Per-item before/after means with a paired bootstrap CI each."""
        paired = [
            s
            for s in self._sessions.values()
            if PHASE_BEFORE in s.cases_r and PHASE_AFTER in s.cases_r
        ]
        if len(paired) < 2:
            raise ValidationError(
                f"need at least 2 sessions with both questionnaire phases, "
                f"have {len(paired)}"
            )
        items = []
        for position, item_id in enumerate(CASES_R_ITEMS):
            before = [s.cases_r[PHASE_BEFORE]["ratings"][position] for s in paired]
            after = [s.cases_r[PHASE_AFTER]["ratings"][position] for s in paired]
            result = paired_bootstrap_ci(
                before,
                after,
                n_resamples=self.bootstrap_resamples,
                seed=self.bootstrap_seed,
            )
            items.append(
                {
                    "item_id": item_id,
                    "n_pairs": len(paired),
                    "before_mean": sum(before) / len(before),
                    "after_mean": sum(after) / len(after),
                    "mean_diff": result.mean_diff,
                    "ci_low": result.ci_low,
                    "ci_high": result.ci_high,
                }
            )
        return {"items": items, "n_pairs": len(paired)}

    def session_view(self, session: Session) -> dict:
        return {
            "session_id": session.session_id,
            "case_id": session.case_id,
            "state": session.state,
            "turns": [
                {"turn_index": u.turn_index, "role": u.role, "text": u.text}
                for u in session.turns
            ],
            "started_at": session.started_at,
            "time_limit_seconds": session.time_limit_seconds,
            "turn_limit": session.turn_limit,
            "remaining_seconds": session.remaining_seconds(),
            "remaining_turns": session.remaining_turns(),
            "feedback": (
                _feedback_wire(session.feedback, self.guideline)
                if session.feedback
                else None
            ),
            "cases_r_phases": sorted(session.cases_r),
        }


def _case_summary(case: ClientCase) -> dict:
    return {"id": case.id, "name": case.name, "profile": case.profile}


class _CreateSessionBody(BaseModel):
    case_id: str
    time_limit_seconds: int | None = None
    turn_limit: int | None = None


class _MessageBody(BaseModel):
    text: str


class _CasesRBody(BaseModel):
    phase: str
    ratings: list[int]
    item_ids: list[str] | None = None


class _ResolveBody(BaseModel):
    expert_feedback: str
    reviewer_id: str


def create_app(service: TrainingService, static_dir: str | None = None) -> FastAPI:
    """Wire the service into the HTTP API with the uniform error envelope."""
    app = FastAPI(title="mate training service", docs_url=None, redoc_url=None)

    def _envelope(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(
            status_code=status, content={"error": {"code": code, "message": message}}
        )

    @app.exception_handler(MateError)
    async def _mate_error(request, exc: MateError):
        status, code = _ERROR_STATUS.get(type(exc), (500, "internal_error"))
        return _envelope(status, code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _body_error(request, exc: RequestValidationError):
        return _envelope(400, "validation_error", str(exc.errors()[:1]))

    @app.post("/api/sessions", status_code=201)
    def create_session(body: _CreateSessionBody):
        session = service.create_session(
            body.case_id, body.time_limit_seconds, body.turn_limit
        )
        return service.session_view(session)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return service.session_view(service.get_session(session_id))

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: _MessageBody):
        reply = service.post_message(session_id, body.text)
        return {"turn_index": reply.turn_index, "role": reply.role, "text": reply.text}

    @app.post("/api/sessions/{session_id}/finish")
    def finish_session(session_id: str):
        session = service.finish_session(session_id)
        return _feedback_wire(session.feedback, service.guideline)

    @app.post("/api/sessions/{session_id}/cases-r", status_code=201)
    def submit_cases_r(session_id: str, body: _CasesRBody):
        return service.submit_cases_r(
            session_id, body.phase, body.ratings, body.item_ids
        )

    @app.get("/api/cases")
    def list_cases():
        return [_case_summary(c) for c in service.cases.cases]

    @app.get("/api/review")
    def list_review(include_resolved: bool = False):
        items = service.store.list_review(include_resolved=include_resolved)
        out = []
        for item in items:
            row = item.as_dict()
            try:
                pair = service.store.get_pair(item.dialogue_id)
            except NotFoundError:
                pair = None
            if pair is not None:
                row["record"] = {
                    "dialogue_id": pair.dialogue.dialogue_id,
                    "transcript": pair.dialogue.transcript(),
                    "turns": [
                        {"turn_index": u.turn_index, "role": u.role, "text": u.text}
                        for u in pair.dialogue.turns
                    ],
                    "category_id": pair.feedback.category_id,
                    "category_name": service.guideline.get(
                        pair.feedback.category_id
                    ).category_name,
                    "problematic_turns": sorted(pair.feedback.problematic_turns),
                    "problematic_quotes": list(pair.feedback.problematic_quotes),
                    "refinement_status": pair.feedback.refinement_status.value,
                }
            out.append(row)
        return out

    @app.post("/api/review/{dialogue_id}/resolve")
    def resolve_review(dialogue_id: str, body: _ResolveBody):
        item = service.store.resolve_review(
            dialogue_id, body.expert_feedback, body.reviewer_id
        )
        return item.as_dict()

    @app.get("/api/reports/self-efficacy")
    def self_efficacy():
        return service.self_efficacy_summary()

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    service: TrainingService,
    host: str = "127.0.0.1",
    port: int = 8000,
    static_dir: str | None = None,
) -> None:
    import uvicorn

    uvicorn.run(create_app(service, static_dir=static_dir), host=host, port=port, log_level="warning")
