"""HTTP step-session service: the engine behind interactive scheduling.

One POST endpoint speaks a small message protocol (newline-delimited JSON
over local HTTP). A session wraps an engine run whose activation sets and
tie-breaks come from the client, so a human or script plays the adversary;
the server owns all semantics and the client renders responses verbatim.

Requests (all carry version, and session except new):

  new{instance}         start a session from instance file text
  state{}               full board: per-particle and per-node predicates,
                        metrics, check statuses
  enabled{}             ids whose activation would change the configuration
  step{ids, tie_breaks} apply one round; unresolved conflicts come back as
                        applied=false and the client re-sends choices
  auto{scheduler, rounds, adversary}
                        run rounds with a named scheduler/policy
  undo{}                rewind one applied round
  export{}              the session so far as a replayable trace file

History is linear: every applied round is kept, undo pops one. Errors are
in-band: {"type": "error", "error": msg} with HTTP status 400/404.
"""

from __future__ import annotations

import itertools
import json
from typing import Any, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import Response
from pydantic import BaseModel, Field, ValidationError

from . import checkers, rule, tracefile
from .engine import (
    TRACE_VERSION,
    ConflictsPending,
    EngineError,
    RunState,
    RunSummary,
    StepRecord,
    Trace,
    enabled_set,
    initial_state,
    step_round,
)
from .instances import InstanceError, parse_instance
from .model import CONTRACTED, Configuration, View
from .scheduler import parse_adversary, parse_scheduler

PROTOCOL_VERSION = 1
VIEW_MARGIN = 2          # node predicates are reported this far past the bbox


class ServiceError(Exception):
    def __init__(self, message: str, status: int = 400):
        super().__init__(message)
        self.status = status


class TieBreakChoice(BaseModel):
    site: Any                    # [q,r] for node conflicts, [[q,r],[q,r]] for edges
    chosen: int
    kind: Optional[Literal["node", "edge"]] = None

    def as_choice(self) -> tuple[tuple, int]:
        site = self.site
        try:
            if site and isinstance(site[0], (list, tuple)):
                a, b = ((int(q), int(r)) for q, r in site)
                return (min(a, b), max(a, b)), self.chosen
            q, r = site
            return (int(q), int(r)), self.chosen
        except (TypeError, ValueError) as exc:
            raise ServiceError(f"malformed tie-break site {site!r}") from exc


class NewRequest(BaseModel):
    version: int
    type: Literal["new"]
    instance: str


class SessionRequest(BaseModel):
    version: int
    session: str


class StateRequest(SessionRequest):
    type: Literal["state"]


class EnabledRequest(SessionRequest):
    type: Literal["enabled"]


class StepRequest(SessionRequest):
    type: Literal["step"]
    ids: list[int]
    tie_breaks: list[TieBreakChoice] = Field(default_factory=list)


class AutoRequest(SessionRequest):
    type: Literal["auto"]
    scheduler: str = "serial"
    rounds: int = 1
    adversary: str = "first"


class UndoRequest(SessionRequest):
    type: Literal["undo"]


class ExportRequest(SessionRequest):
    type: Literal["export"]


_REQUEST_TYPES: dict[str, type[BaseModel]] = {
    "new": NewRequest,
    "state": StateRequest,
    "enabled": EnabledRequest,
    "step": StepRequest,
    "auto": AutoRequest,
    "undo": UndoRequest,
    "export": ExportRequest,
}


class Session:
    """Linear history of engine states driven by client messages."""

    def __init__(self, sid: str, config: Configuration):
        self.sid = sid
        self.initial = config
        self.states: list[RunState] = [initial_state(config, strict=False)]
        self.records: list[StepRecord] = []

    @property
    def state(self) -> RunState:
        return self.states[-1]

    def step(self, ids: list[int], choices: dict) -> StepRecord:
        try:
            state, record = step_round(self.state, ids, choices=choices)
        except ConflictsPending:
            raise
        except EngineError as exc:
            raise ServiceError(str(exc)) from exc
        self.states.append(state)
        self.records.append(record)
        return record

    def auto(self, scheduler_spec: str, rounds: int, adversary_spec: str) -> int:
        try:
            scheduler = parse_scheduler(scheduler_spec)
            adversary = parse_adversary(adversary_spec)
        except ValueError as exc:
            raise ServiceError(str(exc)) from exc
        if adversary is None:
            raise ServiceError("auto needs a concrete tie-break policy")
        applied = 0
        for _ in range(rounds):
            state = self.state
            if state.is_final():
                break
            activated = scheduler.next_activation(state)
            if not activated:
                if enabled_set(state):
                    raise ServiceError("scheduler returned no activations")
                break
            try:
                state, record = step_round(state, activated, adversary=adversary)
            except EngineError as exc:
                raise ServiceError(str(exc)) from exc
            self.states.append(state)
            self.records.append(record)
            applied += 1
        return applied

    def undo(self) -> None:
        if not self.records:
            raise ServiceError("nothing to undo")
        self.states.pop()
        self.records.pop()

    def trace(self) -> Trace:
        # a session is a run prefix: the summary line exists only once the
        # run is really over, so zero steps export as a bare header
        state = self.state
        summary = None
        if self.records and state.is_final():
            summary = RunSummary(
                steps=state.step_count,
                moves=state.move_count,
                expansions=state.expansion_count,
                union_bbox=state.union_bbox,
                terminated=True,
                stop="final",
            )
        return Trace(
            version=TRACE_VERSION,
            n=state.n,
            floor=state.floor,
            initial=self.initial,
            records=list(self.records),
            summary=summary,
        )

    def distinct_configs(self) -> int:
        keys = {self.states[0].config.canonical_key()}
        keys.update(rec.config_key for rec in self.records)
        return len(keys)


def _node_entry(config: Configuration, v: tuple[int, int]) -> dict:
    view = View.from_config(config, v)
    occupied = config.occupied(v)
    state = config.state(v) if occupied else None
    entry: dict[str, Any] = {
        "node": list(v),
        "occupied": occupied,
        "state": (CONTRACTED if state is None else state) if occupied else None,
        "semi_occupied": config.semi_occupied(v),
        "predicates": {
            "upper": view.upper(),
            "lower": view.lower(),
            "pointed": view.pointed(),
            "near": view.near(),
        },
        "decision": None,
    }
    if occupied:
        if state is None:
            action = rule.decide(view)
            entry["decision"] = "noop" if action is None else f"expand:{action}"
        else:
            target = config.expansion_target(v)
            entry["decision"] = "hold" if config.occupied(target) else "contract"
    return entry


def state_payload(session: Session) -> dict:
    state = session.state
    config = state.config
    box = config.bounding_box()
    particles = []
    for pid in state.ids:
        v = state.positions[pid]
        entry = _node_entry(config, v)
        particles.append({
            "id": pid,
            "node": list(v),
            "state": entry["state"],
            "target": (
                list(config.expansion_target(v))
                if config.state(v) is not None else None
            ),
            "predicates": entry["predicates"],
            "decision": entry["decision"],
            "fairness_gap": state.step_count - state.last_active[pid],
        })
    view_q = range(box.q_min - VIEW_MARGIN, box.q_max + VIEW_MARGIN + 1)
    view_r = range(box.r_min - VIEW_MARGIN, box.r_max + VIEW_MARGIN + 1)
    nodes = [
        _node_entry(config, (q, r))
        for r, q in itertools.product(reversed(view_r), view_q)
    ]
    n = state.n
    trace = session.trace()
    checks = {
        report.name: report.status for report in checkers.check_all(trace)
    }
    return {
        "version": PROTOCOL_VERSION,
        "type": "state",
        "session": session.sid,
        "round": state.step_count,
        "config": {
            "key": config.canonical_key(),
            "floor": state.floor,
            "n": n,
            "particles": particles,
        },
        "semi_occupied": sorted(
            list(t)
            for t in {
                config.expansion_target(b)
                for b in config.bodies() if config.state(b) is not None
            }
            if not config.occupied(t)
        ),
        "nodes": nodes,
        "bbox": list(box),
        "union_bbox": list(state.union_bbox),
        "metrics": {
            "n": n,
            "rounds": state.step_count,
            "moves": state.move_count,
            "move_budget": 2 * n * (n - 1),
            "expansions": state.expansion_count,
            "e_moves": list(state.e_moves),
            "se_moves": list(state.se_moves),
            "per_particle_budget": n - 1,
            "distinct_configs": session.distinct_configs(),
            "connected": config.is_connected(),
            "final": state.is_final(),
            "fairness_window": state.fairness_window,
        },
        "checks": checks,
    }


def _respond(session: Session, extra: Optional[dict] = None) -> dict:
    payload = state_payload(session)
    if extra:
        payload.update(extra)
    return payload


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._counter = itertools.count(1)

    def create(self, config: Configuration) -> Session:
        sid = f"s{next(self._counter)}"
        session = Session(sid, config)
        self._sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        try:
            return self._sessions[sid]
        except KeyError:
            raise ServiceError(f"unknown session {sid!r}", status=404) from None


def handle_message(store: SessionStore, message: dict) -> dict:
    if not isinstance(message, dict):
        raise ServiceError("message must be a JSON object")
    version = message.get("version")
    if version != PROTOCOL_VERSION:
        raise ServiceError(f"unsupported protocol version {version!r}")
    mtype = message.get("type")
    model = _REQUEST_TYPES.get(mtype)
    if model is None:
        raise ServiceError(f"unknown message type {mtype!r}")
    try:
        req = model.model_validate(message)
    except ValidationError as exc:
        raise ServiceError(f"malformed {mtype} request: {exc.errors()[0]['msg']}")

    if isinstance(req, NewRequest):
        try:
            config = parse_instance(req.instance)
        except InstanceError as exc:
            raise ServiceError(f"bad instance: {exc}") from exc
        session = store.create(config)
        return _respond(session, {"type": "new"})

    session = store.get(req.session)
    if isinstance(req, StateRequest):
        return _respond(session)
    if isinstance(req, EnabledRequest):
        return {
            "version": PROTOCOL_VERSION,
            "type": "enabled",
            "session": session.sid,
            "round": session.state.step_count,
            "enabled": list(enabled_set(session.state)),
        }
    if isinstance(req, StepRequest):
        choices = dict(tb.as_choice() for tb in req.tie_breaks)
        try:
            record = session.step(req.ids, choices)
        except ConflictsPending as exc:
            return {
                "version": PROTOCOL_VERSION,
                "type": "step",
                "session": session.sid,
                "applied": False,
                "conflicts": [
                    {
                        "kind": c["kind"],
                        "site": tracefile.site_json(c["kind"], c["site"]),
                        "group": list(c["group"]),
                    }
                    for c in exc.conflicts
                ],
            }
        return _respond(session, {
            "type": "step",
            "applied": True,
            "record": tracefile.record_json(record),
        })
    if isinstance(req, AutoRequest):
        if req.rounds < 0:
            raise ServiceError("rounds must be nonnegative")
        applied = session.auto(req.scheduler, req.rounds, req.adversary)
        return _respond(session, {"type": "auto", "rounds_applied": applied})
    if isinstance(req, UndoRequest):
        session.undo()
        return _respond(session, {"type": "undo"})
    assert isinstance(req, ExportRequest)
    return {
        "version": PROTOCOL_VERSION,
        "type": "export",
        "session": session.sid,
        "trace": tracefile.dumps_trace(session.trace()),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="wrain session service", docs_url=None, redoc_url=None)
    store = SessionStore()
    app.state.store = store

    def reply(payload: dict, status: int = 200) -> Response:
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
        return Response(body, status_code=status, media_type="application/json")

    @app.get("/health")
    def health() -> Response:
        return reply({"version": PROTOCOL_VERSION, "type": "health", "ok": True})

    @app.post("/session")
    async def session_endpoint(request: Request) -> Response:
        raw = await request.body()
        responses = []
        try:
            lines = [ln for ln in raw.decode("utf-8").splitlines() if ln.strip()]
            if not lines:
                raise ServiceError("empty request")
            for line in lines:
                try:
                    message = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ServiceError(f"bad JSON: {exc}") from exc
                responses.append(handle_message(store, message))
        except ServiceError as exc:
            return reply(
                {"version": PROTOCOL_VERSION, "type": "error", "error": str(exc)},
                status=exc.status,
            )
        body = "".join(
            json.dumps(p, sort_keys=True, separators=(",", ":")) + "\n"
            for p in responses
        )
        return Response(body, media_type="application/json")

    return app
