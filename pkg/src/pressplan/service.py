"""Turn-based HTTP sessions for running a simulated pressing day by hand.

Each session owns one seeded day.  The client assigns trucks to presses one
request at a time, may ask the optimizer for a hint, and explicitly ends the
interval; the server validates every move against the same rules the
simulator enforces, so no call sequence can reach an illegal state.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .arrivals import ArrivalModel, sample_interval_arrivals
from .domain import DEFAULT_PRICES, PressState, PressType, Truck, empty_press
from .engine import (
    WORKFLOW_CAP,
    LossLedger,
    QueueState,
    StrategyRow,
    age_queue,
    decision_rows,
    fill_decisions,
)
from .simulator import (
    DEFAULT_FLEET,
    ScenarioSpec,
    apply_rows,
    build_scenario,
    build_tables,
    reference_model,
)

DEGRADE_AGE = 4
REJECT_AGE = 8


class RuleViolation(Exception):
    def __init__(self, status: int, code: str, rule: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.rule = rule
        self.message = message


def _reject(code: str, rule: str, message: str, status: int = 409):
    raise RuleViolation(status, code, rule, message)


class CreateSession(BaseModel):
    scenario: dict = {}
    mode: Literal["manual", "assisted"] = "manual"
    seed: int = 0


class Assignment(BaseModel):
    press_id: int
    truck_id: int
    tonnes: int


@dataclass
class Session:
    """One live day: base state at interval start plus moves made so far."""

    session_id: str
    spec: ScenarioSpec
    mode: str
    seed: int
    model: ArrivalModel
    tables: dict
    presses: tuple[PressState, ...]
    queue: QueueState
    rng: np.random.Generator
    t: int = 0
    pending: list[StrategyRow] = field(default_factory=list)
    payoff: float = 0.0
    losses: LossLedger = field(default_factory=LossLedger)
    delivered: int = 0
    pressed: int = 0
    next_truck_id: int = 1
    seen_trucks: set[int] = field(default_factory=set)
    log: list = field(default_factory=list)
    finished: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)
    event_path: Optional[Path] = None

    def record(self, event: str, **payload) -> None:
        if self.event_path is None:
            return
        with self.event_path.open("a") as fh:
            fh.write(json.dumps({"event": event, "interval": self.t, **payload}) + "\n")


def _enter_interval(s: Session) -> None:
    """Sample this interval's deliveries and fold them into the queue."""
    trucks = list(s.queue.trucks)
    arrived = []
    for v, l in sample_interval_arrivals(s.model, s.t, s.rng):
        trucks.append(Truck(s.next_truck_id, v, l, arrival=s.t))
        s.seen_trucks.add(s.next_truck_id)
        arrived.append({"truck_id": s.next_truck_id, "variety": v, "tonnes": l})
        s.delivered += l
        s.next_truck_id += 1
    s.queue = QueueState(tuple(trucks), s.t)
    s.record("arrivals", trucks=arrived)


def _derived(s: Session) -> tuple[tuple[PressState, ...], QueueState, float, int]:
    """Current view: base presses and queue with this interval's moves applied.

    Returns (presses, queue, income booked this interval, tonnes moved).
    """
    per_press: dict[int, list[StrategyRow]] = {}
    for r in s.pending:
        per_press.setdefault(r.press_id, []).append(r)
    presses = []
    income = 0.0
    for pid, st in enumerate(s.presses):
        rows = per_press.get(pid, [])
        if not rows:
            presses.append(st)
            continue
        variety = st.variety if st.load else rows[0].variety
        load = st.load + sum(r.tonnes for r in rows)
        if load == st.press_type.capacity:
            presses.append(PressState(variety, load, st.press_type.processing_intervals, st.press_type))
            income += DEFAULT_PRICES[variety - 1] * load
        else:
            presses.append(PressState(variety, load, 0, st.press_type))
    remaining = {tr.truck_id: tr.load_remaining for tr in s.queue.trucks}
    for r in s.pending:
        remaining[r.truck_id] -= r.tonnes
    trucks = tuple(
        replace(tr, load_remaining=remaining[tr.truck_id])
        for tr in s.queue.trucks
        if remaining[tr.truck_id] > 0
    )
    used = sum(r.tonnes for r in s.pending)
    return tuple(presses), QueueState(trucks, s.t), income, used


def _press_payload(pid: int, st: PressState) -> dict:
    return {
        "press_id": pid,
        "type": st.press_type.name,
        "capacity": st.press_type.capacity,
        "variety": st.variety,
        "load": st.load,
        "spare": st.spare,
        "remaining_intervals": st.remaining,
        "processing": st.is_processing,
    }


def _truck_payload(tr: Truck, t: int) -> dict:
    age = t - tr.arrival
    return {
        "truck_id": tr.truck_id,
        "variety": tr.variety,
        "load_remaining": tr.load_remaining,
        "arrival": tr.arrival,
        "age": age,
        "degraded": tr.degraded,
        "intervals_to_degradation": None if tr.degraded else max(0, DEGRADE_AGE - age),
        "intervals_to_rejection": max(0, REJECT_AGE - age),
    }


def _state_payload(s: Session) -> dict:
    presses, queue, income, used = _derived(s)
    return {
        "session_id": s.session_id,
        "mode": s.mode,
        "seed": s.seed,
        "scenario_id": s.spec.scenario_id,
        "interval": s.t,
        "horizon": s.model.horizon,
        "finished": s.finished,
        "payoff": s.payoff + income,
        "losses": {
            "degradation": s.losses.degradation,
            "rejection": s.losses.rejection,
            "leftover": s.losses.leftover,
            "total": s.losses.total,
        },
        "cap_remaining": WORKFLOW_CAP - used,
        "presses": [_press_payload(pid, st) for pid, st in enumerate(presses)],
        "queue": [_truck_payload(tr, s.t) for tr in queue.trucks],
        "assignments": [
            {"press_id": r.press_id, "truck_id": r.truck_id, "variety": r.variety, "tonnes": r.tonnes}
            for r in s.pending
        ],
    }


def _check_assignment(s: Session, a: Assignment) -> StrategyRow:
    """Validate one move against the current derived view, or raise."""
    presses, queue, _, used = _derived(s)
    if not 0 <= a.press_id < len(presses):
        _reject("unknown-press", "press identity", f"no press with id {a.press_id}", status=404)
    truck = next((tr for tr in queue.trucks if tr.truck_id == a.truck_id), None)
    if truck is None:
        if a.truck_id in s.seen_trucks:
            _reject(
                "truck-expired",
                "queue age limit",
                f"truck {a.truck_id} is no longer in the queue (emptied, rejected or day over)",
            )
        _reject("unknown-truck", "truck identity", f"no truck with id {a.truck_id}", status=404)
    if a.tonnes <= 0 or a.tonnes % 5:
        _reject("invalid-tonnage", "5 t granularity", f"tonnage must be a positive multiple of 5, got {a.tonnes}", status=422)
    press = presses[a.press_id]
    if press.is_processing:
        _reject(
            "press-blocked",
            "processing lock",
            f"press {a.press_id} is mid cycle for {press.remaining} more interval(s)",
        )
    if press.load and press.variety != truck.variety:
        _reject(
            "variety-mismatch",
            "one variety per press",
            f"press {a.press_id} holds variety {press.variety}, truck carries variety {truck.variety}",
        )
    if a.tonnes > press.spare:
        _reject(
            "overfill",
            "press capacity",
            f"press {a.press_id} has {press.spare} t of space, cannot take {a.tonnes} t",
        )
    if a.tonnes > truck.load_remaining:
        _reject(
            "overfill",
            "truck load",
            f"truck {a.truck_id} carries only {truck.load_remaining} t, cannot take {a.tonnes} t",
        )
    if used + a.tonnes > WORKFLOW_CAP:
        _reject(
            "cap-exceeded",
            "75 t per interval workflow cap",
            f"{used} t already moved this interval; {a.tonnes} t more would exceed {WORKFLOW_CAP} t",
        )
    return StrategyRow(a.press_id, a.truck_id, truck.arrival, truck.variety, a.tonnes)


def create_app(
    reference: ArrivalModel | None = None,
    fleet: tuple[PressType, ...] = DEFAULT_FLEET,
    event_log_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Build the session API around one reference arrival model."""
    app = FastAPI(title="pressplan session service")
    base_model = reference if reference is not None else reference_model()
    sessions: dict[str, Session] = {}
    tables_cache: dict[ScenarioSpec, tuple[ArrivalModel, dict]] = {}
    counter = itertools.count(1)
    registry_lock = threading.Lock()

    @app.exception_handler(RuleViolation)
    async def rule_violation_handler(request: Request, exc: RuleViolation):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "rule": exc.rule, "message": exc.message},
        )

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            _reject("unknown-session", "session identity", f"no session {session_id!r}", status=404)
        return s

    def scenario_assets(spec: ScenarioSpec) -> tuple[ArrivalModel, dict]:
        with registry_lock:
            if spec not in tables_cache:
                model = build_scenario(spec, base_model)
                tables_cache[spec] = (model, build_tables(model, fleet))
            return tables_cache[spec]

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        try:
            spec = ScenarioSpec(**body.scenario)
        except (TypeError, ValueError) as exc:
            _reject("invalid-scenario", "scenario definition", str(exc), status=422)
        model, tables = scenario_assets(spec)
        with registry_lock:
            session_id = f"s{next(counter):04d}"
        event_path = None
        if event_log_dir is not None:
            event_path = Path(event_log_dir) / f"{session_id}.jsonl"
            event_path.parent.mkdir(parents=True, exist_ok=True)
        s = Session(
            session_id=session_id,
            spec=spec,
            mode=body.mode,
            seed=body.seed,
            model=model,
            tables=tables,
            presses=tuple(empty_press(pt) for pt in fleet),
            queue=QueueState((), 0),
            rng=np.random.default_rng([body.seed, 0]),
            event_path=event_path,
        )
        s.record("created", scenario=spec.scenario_id, mode=body.mode, seed=body.seed)
        _enter_interval(s)
        sessions[session_id] = s
        return {"session_id": session_id, "state": _state_payload(s)}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        s = get_session(session_id)
        with s.lock:
            return _state_payload(s)

    @app.post("/sessions/{session_id}/assignments", status_code=201)
    def post_assignment(session_id: str, body: Assignment):
        s = get_session(session_id)
        with s.lock:
            if s.finished:
                _reject("session-finished", "day over", "the day has ended; no further moves")
            row = _check_assignment(s, body)
            s.pending.append(row)
            # the executed semantics stay engine-identical by construction;
            # prove it now rather than fail later at advance time
            try:
                apply_rows(s.presses, s.queue, s.t, s.pending)
            except ValueError as exc:
                s.pending.pop()
                raise RuntimeError(f"validation drifted from executor: {exc}") from exc
            s.record(
                "assignment",
                press_id=row.press_id,
                truck_id=row.truck_id,
                variety=row.variety,
                tonnes=row.tonnes,
            )
            return _state_payload(s)

    @app.get("/sessions/{session_id}/hint")
    def get_hint(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if s.finished:
                _reject("session-finished", "day over", "the day has ended; nothing to plan")
            if s.mode != "assisted":
                _reject("hints-disabled", "session mode", "hints are only available in assisted sessions", status=403)
            presses, queue, _, used = _derived(s)
            decisions = fill_decisions(presses, queue, s.t, s.tables, cap=WORKFLOW_CAP - used)
            rows = decision_rows(queue, decisions[0].controls)
            return {
                "interval": s.t,
                "score": decisions[0].score,
                "alternatives": len(decisions),
                "assignments": [
                    {"press_id": r.press_id, "truck_id": r.truck_id, "variety": r.variety, "tonnes": r.tonnes}
                    for r in rows
                ],
            }

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if s.finished:
                _reject("session-finished", "day over", "the day has ended; nothing to advance")
            presses, queue, income = apply_rows(s.presses, s.queue, s.t, s.pending)
            s.payoff += income
            s.pressed += sum(r.tonnes for r in s.pending)
            s.log.append((s.t, tuple(s.pending)))
            queue, charge = age_queue(queue, s.model.horizon)
            s.losses = s.losses + charge
            s.presses = presses
            s.queue = queue
            s.pending = []
            s.record("advance", income=income)
            s.t += 1
            if s.t >= s.model.horizon:
                s.finished = True
                s.record("finished", payoff=s.payoff)
            else:
                _enter_interval(s)
            return _state_payload(s)

    @app.get("/sessions/{session_id}/results")
    def get_results(session_id: str):
        s = get_session(session_id)
        with s.lock:
            if not s.finished:
                _reject("session-active", "day over", "results are available once the day has ended")
            return {
                "scenario_id": s.spec.scenario_id,
                "policy": s.mode,
                "seed": s.seed,
                "payoff": s.payoff,
                "losses": {
                    "degradation": s.losses.degradation,
                    "rejection": s.losses.rejection,
                    "leftover": s.losses.leftover,
                    "total": s.losses.total,
                },
                "tonnes_delivered": s.delivered,
                "tonnes_pressed": s.pressed,
                "tonnes_rejected": int(s.losses.rejection),
                "tonnes_left": sum(tr.load_remaining for tr in s.queue.trucks),
                "intervals": [
                    {"interval": t, "assignments": len(rows)} for t, rows in s.log
                ],
            }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
