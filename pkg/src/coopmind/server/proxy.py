"""Scripted human proxy.

Drives the full wire protocol as a client would: creates a session over
HTTP, speaks the WebSocket message schema, reconstructs the game state
from the broadcast payloads (never from local simulation), asks a
policy for the blue player's action, and answers questionnaires.  Used
for end-to-end tests and online-accuracy runs without a browser.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..agents.policy import Policy
from ..env.layout import Layout, parse_layout
from ..env.state import GameState, PlayerState, PotState


def state_from_wire(message: dict) -> GameState:
    return GameState(
        timestep=message["tick"],
        players=tuple(PlayerState.from_dict(p) for p in message["players"]),
        pots=tuple(PotState.from_dict(p) for p in message["pots"]),
        counter_items=tuple(
            sorted((tuple(loc), item) for loc, item in message.get("counters", []))
        ),
        cumulative_reward=float(message["score"]),
    )


def layout_from_wire(payload: dict) -> Layout:
    # Rebuild through the parser so all invariants are enforced; starts
    # are irrelevant for the proxy, any two floor cells will do.
    tiles = payload["tiles"]
    floors = [
        (x, y)
        for y, row in enumerate(tiles)
        for x, ch in enumerate(row)
        if ch == "."
    ]
    starts = f"{floors[0][0]},{floors[0][1]},N {floors[1][0]},{floors[1][1]},N"
    text = f"name: {payload['name']}\nstarts: {starts}\n" + "\n".join(tiles)
    return parse_layout(text)


@dataclass
class ProxyResult:
    session_id: str
    episodes_played: int = 0
    final_rewards: list[float] = field(default_factory=list)
    messages_seen: int = 0


def run_proxy_session(
    client,
    participant_id: str,
    policy_factory,
    group: str = "tom",
    seed: int | None = None,
    max_episodes: int | None = None,
    questionnaire_answer: int = 4,
    rng_seed: int = 0,
) -> ProxyResult:
    """Play a whole session through a TestClient-compatible interface.

    ``policy_factory(layout) -> Policy`` supplies the human stand-in per
    episode; the proxy samples it on every state broadcast."""
    response = client.post(
        "/sessions",
        json={"participant_id": participant_id, "group": group, "seed": seed},
    )
    response.raise_for_status()
    session_id = response.json()["session_id"]
    result = ProxyResult(session_id=session_id)
    rng = np.random.default_rng(rng_seed)

    policy: Policy | None = None
    layout: Layout | None = None

    with client.websocket_connect(f"/ws/{session_id}") as ws:
        ws.send_text(json.dumps({"type": "ready"}))
        while True:
            message = json.loads(ws.receive_text())
            result.messages_seen += 1
            kind = message.get("type")
            if kind == "episode_start":
                layout = layout_from_wire(message["layout"])
                policy = policy_factory(layout)
            elif kind == "state":
                state = state_from_wire(message)
                action = policy.sample(state, 0, rng)
                ws.send_text(json.dumps({"type": "action", "action": int(action)}))
            elif kind in ("episode_end", "tutorial_passed", "tutorial_retry"):
                if kind == "episode_end":
                    result.episodes_played += 1
                    result.final_rewards.append(message["reward"])
                    if max_episodes and result.episodes_played >= max_episodes:
                        # answer the pending questionnaire, then leave
                        message = json.loads(ws.receive_text())
                        assert message.get("type") == "questionnaire_request"
                        answers = [questionnaire_answer] * len(message["items"])
                        ws.send_text(json.dumps({"type": "questionnaire", "answers": answers}))
                        json.loads(ws.receive_text())  # ack
                        break
            elif kind == "questionnaire_request":
                answers = [questionnaire_answer] * len(message["items"])
                ws.send_text(json.dumps({"type": "questionnaire", "answers": answers}))
            elif kind == "questionnaire_ack":
                continue
            elif kind == "session_done":
                break
            elif kind == "error":
                raise RuntimeError(f"server error: {message}")
    return result
