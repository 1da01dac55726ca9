"""The network service: WebSocket game channel plus admin HTTP.

One asyncio task drives each connected session's tick clock, so a
session has exactly one writer; the receive loop only buffers inputs
and answers questionnaires.  In realtime mode the clock runs at the
configured tick rate with Wait as the default action; in lockstep mode
(tick_seconds == 0) the server waits for one client message per tick,
which makes scripted-proxy episodes exactly reproducible.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..env.layout import load_layout
from ..env.mdp import step as env_step
from ..env.state import Action, GameState
from .session import (
    DuplicateParticipantError,
    GROUPS,
    GameSession,
    PHASE_DONE,
    PHASE_QUESTIONNAIRE,
    SCHEMA_VERSION,
    SessionConfig,
    SessionError,
    UnknownEpisodeError,
    build_episode_plan,
    default_agent_policy,
)


@dataclass
class ServerConfig:
    admin_token: str = ""
    tick_seconds: float = 0.2  # 5 fps; 0 enables lockstep mode
    ticks_per_episode: int = 400
    include_tutorial: bool = True
    log_dir: Optional[str] = None
    model_paths: dict = field(default_factory=dict)  # (layout, style) -> checkpoint
    layout_order: Optional[tuple] = None

    def __post_init__(self):
        if not self.admin_token:
            self.admin_token = secrets.token_hex(16)


class SessionStore:
    def __init__(self, config: ServerConfig):
        self.config = config
        self.sessions: dict[str, GameSession] = {}
        self._group_cycle = itertools.cycle(GROUPS)
        self._counter = itertools.count(1)
        self._predictors: dict = {}

    def create(self, participant_id: str, group: Optional[str], seed: Optional[int]) -> GameSession:
        if any(
            s.config.participant_id == participant_id for s in self.sessions.values()
        ):
            raise DuplicateParticipantError(f"participant {participant_id!r} already has a session")
        if group is None or group == "auto":
            group = next(self._group_cycle)
        if group not in GROUPS:
            raise SessionError(f"unknown group {group!r}")
        number = next(self._counter)
        if seed is None:
            seed = number * 7919
        plan_kwargs = {}
        if self.config.layout_order:
            plan_kwargs["layout_order"] = self.config.layout_order
        session_config = SessionConfig(
            participant_id=participant_id,
            group=group,
            seed=seed,
            plan=build_episode_plan(seed, **plan_kwargs),
            ticks_per_episode=self.config.ticks_per_episode,
            tick_rate=(1.0 / self.config.tick_seconds) if self.config.tick_seconds else 0.0,
            include_tutorial=self.config.include_tutorial,
        )
        session_id = f"s{number:04d}"
        session = GameSession(
            session_id,
            session_config,
            agent_provider=default_agent_policy,
            predictor_provider=self._predictor_provider if self.config.model_paths else None,
        )
        self.sessions[session_id] = session
        return session

    def _predictor_provider(self, layout, style):
        key = (layout.name, style)
        if key not in self._predictors:
            from ..bench.predictors import ToMPredictor
            from ..model.training import load_model

            path = self.config.model_paths.get(key) or self.config.model_paths.get(layout.name)
            if path is None:
                return None
            self._predictors[key] = ToMPredictor(load_model(path), layout)
        return self._predictors[key]

    def all_logs(self, include_broken: bool, participant: Optional[str] = None) -> list[dict]:
        logs = []
        for session in self.sessions.values():
            for log in session.logs:
                if participant and log.participant_id != participant:
                    continue
                if log.broken and not include_broken:
                    continue
                logs.append(log.to_dict())
        return logs

    def find_episode(self, episode_id: str):
        for session in self.sessions.values():
            for log in session.logs:
                if log.episode_id == episode_id:
                    return log
        raise UnknownEpisodeError(episode_id)


class CreateSessionRequest(BaseModel):
    participant_id: str
    group: Optional[str] = None
    seed: Optional[int] = None


class FlagRequest(BaseModel):
    episode_id: str
    reason: str = ""


def validate_episode_log(log: dict) -> bool:
    """Replay the logged actions through the simulator and check the
    stored snapshots and reward match exactly."""
    ticks = log["ticks"]
    if not ticks:
        return True
    layout = load_layout(log["layout_id"])
    state = GameState.from_dict(ticks[0]["state"])
    reward = 0.0
    for record in ticks:
        if GameState.from_dict(record["state"]) != state:
            return False
        joint = (Action(record["human_action"]), Action(record["agent_action"]))
        outcome = env_step(layout, state, joint)
        state = outcome.next_state
        reward += outcome.reward
    expected = log.get("delivery_reward")
    return expected is None or abs(reward - expected) < 1e-9


def create_app(
    config: ServerConfig | None = None,
    store: SessionStore | None = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    config = config or ServerConfig()
    store = store or SessionStore(config)
    app = FastAPI(title="coopmind game service")
    app.state.store = store
    app.state.config = config

    @app.post("/sessions")
    async def create_session(request: CreateSessionRequest):
        try:
            session = store.create(request.participant_id, request.group, request.seed)
        except DuplicateParticipantError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "schema": SCHEMA_VERSION,
            "session_id": session.session_id,
            "group": session.config.group,
            "plan": [list(p) for p in session.config.plan],
            "seed": session.config.seed,
        }

    def check_admin(request: Request):
        token = request.headers.get("x-admin-token", "")
        if token != config.admin_token:
            raise HTTPException(status_code=401, detail="Unauthorized")

    @app.get("/sessions")
    async def list_sessions(request: Request):
        check_admin(request)
        return {
            "schema": SCHEMA_VERSION,
            "sessions": [
                {
                    "session_id": s.session_id,
                    "participant_id": s.config.participant_id,
                    "group": s.config.group,
                    "phase": s.phase,
                    "episode_index": s.episode_index,
                    "episodes_logged": len(s.logs),
                }
                for s in store.sessions.values()
            ],
        }

    @app.get("/logs")
    async def export_logs(
        request: Request,
        include_broken: bool = Query(False),
        participant: Optional[str] = Query(None),
        validate: bool = Query(True),
    ):
        check_admin(request)
        logs = store.all_logs(include_broken=include_broken, participant=participant)
        if validate:
            for log in logs:
                if not validate_episode_log(log):
                    raise HTTPException(
                        status_code=500,
                        detail=f"episode {log['episode_id']} fails replay validation",
                    )
        return {"schema": SCHEMA_VERSION, "logs": logs}

    @app.post("/flag")
    async def flag_episode(request: Request, body: FlagRequest):
        check_admin(request)
        try:
            log = store.find_episode(body.episode_id)
        except UnknownEpisodeError:
            raise HTTPException(status_code=404, detail=f"unknown episode {body.episode_id}")
        log.broken = True
        log.broken_reason = body.reason
        return {"schema": SCHEMA_VERSION, "flagged": body.episode_id}

    @app.websocket("/ws/{session_id}")
    async def game_channel(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            session = store.sessions[session_id]
        except KeyError:
            await websocket.send_json(
                {"type": "error", "schema": SCHEMA_VERSION, "code": "UnknownSession"}
            )
            await websocket.close()
            return
        try:
            await _drive_session(websocket, session, config, store)
        except WebSocketDisconnect:
            pass

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")

    return app


async def _recv(websocket: WebSocket) -> dict:
    return json.loads(await websocket.receive_text())


async def _drive_session(websocket, session: GameSession, config: ServerConfig, store):
    lockstep = config.tick_seconds == 0

    # Wait for the client to declare readiness.
    while True:
        message = await _recv(websocket)
        if message.get("type") == "ready":
            break

    while session.phase != PHASE_DONE:
        await websocket.send_json(session.episode_start_message())
        await websocket.send_json(session.state_message())
        # episode loop
        while session._episode_active:
            if lockstep:
                message = await _recv(websocket)
                _apply_client_message(session, message)
            else:
                deadline = asyncio.get_event_loop().time() + config.tick_seconds
                while True:
                    timeout = deadline - asyncio.get_event_loop().time()
                    if timeout <= 0:
                        break
                    try:
                        message = await asyncio.wait_for(_recv(websocket), timeout=timeout)
                    except asyncio.TimeoutError:
                        break
                    _apply_client_message(session, message)
            payload = session.tick()
            await websocket.send_json(payload)
            if payload["type"] == "state":
                continue
            if payload["type"] in ("tutorial_passed", "tutorial_retry"):
                break  # restart outer loop with a fresh episode_start

        if session.phase == PHASE_QUESTIONNAIRE:
            await websocket.send_json(session.questionnaire_message())
            while session.phase == PHASE_QUESTIONNAIRE:
                message = await _recv(websocket)
                if message.get("type") != "questionnaire":
                    _apply_client_message(session, message)
                    continue
                try:
                    session.submit_questionnaire(list(message.get("answers", [])))
                    await websocket.send_json(
                        {"type": "questionnaire_ack", "schema": SCHEMA_VERSION}
                    )
                except SessionError as exc:
                    await websocket.send_json(
                        {
                            "type": "error",
                            "schema": SCHEMA_VERSION,
                            "code": exc.code,
                            "message": str(exc),
                        }
                    )
        _persist_logs(session, config)

    await websocket.send_json({"type": "session_done", "schema": SCHEMA_VERSION})


def _apply_client_message(session: GameSession, message: dict):
    kind = message.get("type")
    if kind == "action":
        try:
            session.submit_action(message.get("action"))
        except SessionError:
            pass  # late or malformed actions are dropped, never fatal
    # "ready" and unknown types are ignored mid-episode


def _persist_logs(session: GameSession, config: ServerConfig):
    if not config.log_dir:
        return
    root = Path(config.log_dir)
    root.mkdir(parents=True, exist_ok=True)
    for log in session.logs:
        path = root / f"{log.episode_id}.json"
        if not path.exists():
            path.write_text(json.dumps(log.to_dict()))
