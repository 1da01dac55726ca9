"""Session lifecycle and the authoritative tick state machine.

A session walks one participant through an optional solo tutorial and a
fixed plan of ten episodes (five layouts in order, each with both agent
styles; the style order of the first layout is seeded-random and then
alternates).  The human is always player 0 (rendered blue), the agent
player 1 (green).  Clients never simulate: every visible state comes
out of ``tick``, which consumes the single buffered human action
(last-write-wins, Wait default), samples the agent policy, steps the
environment, logs the step together with the prediction that was on
screen, and returns the next broadcast payload.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..agents.planner import PlannerParams, planner_policy
from ..agents.policy import Policy
from ..env.layout import Layout, load_layout
from ..env.mdp import initial_state, step, terminal_bonus
from ..env.state import Action, DELIVERED, NUM_ACTIONS
from ..model.geometry import project_positions

GROUP_NONE = "no_predictor"
GROUP_RANDOM = "random"
GROUP_TOM = "tom"
GROUPS = (GROUP_NONE, GROUP_RANDOM, GROUP_TOM)

DEFAULT_LAYOUT_ORDER = (
    "coordination_ring",
    "double_rings",
    "double_counters",
    "matrix",
    "clear_division",
)
AGENT_STYLES = ("egocentric", "partner_aware")

QUESTIONNAIRE_ITEMS = (
    "partner_satisfaction",
    "predictor_satisfaction",
    "situational_awareness",
    "cooperation_efficiency",
)

SCHEMA_VERSION = 1


class SessionError(ValueError):
    code = "SessionError"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class DuplicateParticipantError(SessionError):
    code = "DuplicateParticipant"


class UnknownSessionError(SessionError):
    code = "UnknownSession"


class InvalidActionError(SessionError):
    code = "InvalidAction"


class EpisodeOverError(SessionError):
    code = "EpisodeOver"


class WrongPhaseError(SessionError):
    code = "WrongPhase"


class OutOfRangeAnswerError(SessionError):
    code = "OutOfRangeAnswer"


class UnknownEpisodeError(SessionError):
    code = "UnknownEpisode"


@dataclass
class SessionConfig:
    participant_id: str
    group: str
    seed: int
    plan: list[tuple[str, str]]  # (layout name, agent style) per episode
    ticks_per_episode: int = 400
    tick_rate: float = 5.0
    history_length: int = 10
    prediction_length: int = 3
    include_tutorial: bool = True
    predictor_budget_ms: float = 200.0  # inference slower than this reuses the last forecast

    def to_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "group": self.group,
            "seed": self.seed,
            "plan": [list(p) for p in self.plan],
            "ticks_per_episode": self.ticks_per_episode,
            "tick_rate": self.tick_rate,
            "history_length": self.history_length,
            "prediction_length": self.prediction_length,
            "include_tutorial": self.include_tutorial,
            "predictor_budget_ms": self.predictor_budget_ms,
        }


def build_episode_plan(seed: int, layout_order=DEFAULT_LAYOUT_ORDER) -> list[tuple[str, str]]:
    """Five layouts in fixed order, two episodes each; the agent-style
    order of the first layout is random and each following layout
    reverses its predecessor's."""
    rng = np.random.default_rng(seed)
    first = tuple(AGENT_STYLES) if rng.integers(2) == 0 else tuple(reversed(AGENT_STYLES))
    plan = []
    order = first
    for layout_name in layout_order:
        plan.extend((layout_name, style) for style in order)
        order = tuple(reversed(order))
    return plan


def default_agent_policy(layout: Layout, style: str) -> Policy:
    """The live green-player policy for an agent style."""
    params = {
        "egocentric": PlannerParams(style="egocentric", epsilon=0.05),
        "partner_aware": PlannerParams(style="partner_aware", epsilon=0.05),
    }[style]
    return planner_policy(layout, params, policy_id=f"live_{style}")


class WaitPolicy(Policy):
    """Parked partner for the solo tutorial."""

    policy_id = "tutorial_idle"

    def action_distribution(self, state, ego):
        dist = np.zeros(NUM_ACTIONS)
        dist[int(Action.WAIT)] = 1.0
        return dist


@dataclass
class EpisodeLog:
    episode_id: str
    session_id: str
    participant_id: str
    group: str
    layout_id: str
    agent_style: str
    seed: int
    is_tutorial: bool = False
    ticks: list[dict] = field(default_factory=list)
    final_reward: Optional[float] = None
    delivery_reward: Optional[float] = None
    questionnaire: Optional[dict] = None
    broken: bool = False
    broken_reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "episode_id": self.episode_id,
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "group": self.group,
            "layout_id": self.layout_id,
            "agent_style": self.agent_style,
            "seed": self.seed,
            "is_tutorial": self.is_tutorial,
            "ticks": self.ticks,
            "final_reward": self.final_reward,
            "delivery_reward": self.delivery_reward,
            "questionnaire": self.questionnaire,
            "broken": self.broken,
            "broken_reason": self.broken_reason,
        }


PHASE_TUTORIAL = "tutorial"
PHASE_PLAYING = "playing"
PHASE_QUESTIONNAIRE = "questionnaire"
PHASE_DONE = "done"


class GameSession:
    """One participant's authoritative game state.

    Not thread-safe by design: the service serializes each session's
    tick loop (one logical writer); distinct sessions are independent.
    """

    def __init__(
        self,
        session_id: str,
        config: SessionConfig,
        agent_provider: Callable[[Layout, str], Policy] = default_agent_policy,
        predictor_provider: Optional[Callable[[Layout, str], object]] = None,
    ):
        self.session_id = session_id
        self.config = config
        self.agent_provider = agent_provider
        self.predictor_provider = predictor_provider
        self.rng = np.random.default_rng(config.seed)
        self.episode_index = -1  # -1 while in tutorial
        self.predictor_overruns = 0
        self.logs: list[EpisodeLog] = []
        self.phase = PHASE_TUTORIAL if config.include_tutorial else PHASE_PLAYING
        self._tutorial_passed = not config.include_tutorial
        self._pending_action: Optional[Action] = None
        self._episode_active = False
        if config.include_tutorial:
            self._start_tutorial()
        else:
            self._start_episode(0)

    # -- episode setup -------------------------------------------------------

    def _start_tutorial(self):
        self.layout = load_layout("tutorial")
        self.agent = WaitPolicy()
        self.predictor = None
        self.is_tutorial = True
        self._reset_board("tutorial", "none")

    def _start_episode(self, index: int):
        layout_name, style = self.config.plan[index]
        self.layout = load_layout(layout_name)
        self.agent = self.agent_provider(self.layout, style)
        self.is_tutorial = False
        self.predictor = None
        if self.config.group == GROUP_TOM and self.predictor_provider is not None:
            self.predictor = self.predictor_provider(self.layout, style)
        self.episode_index = index
        self._reset_board(layout_name, style)
        self.phase = PHASE_PLAYING

    def _reset_board(self, layout_name: str, style: str):
        self.state = initial_state(self.layout)
        self.tick_count = 0
        self._pending_action = None
        self._window: deque = deque(maxlen=self.config.history_length - 1)
        self._episode_active = True
        self.current_prediction = self._compute_prediction()
        episode_id = f"{self.session_id}_e{len(self.logs)}"
        self.log = EpisodeLog(
            episode_id=episode_id,
            session_id=self.session_id,
            participant_id=self.config.participant_id,
            group=self.config.group,
            layout_id=layout_name,
            agent_style=style,
            seed=self.config.seed,
            is_tutorial=self.is_tutorial,
        )

    # -- client input ----------------------------------------------------------

    def submit_action(self, action: int):
        if not self._episode_active:
            raise EpisodeOverError("episode is over; wait for the next one")
        try:
            action = Action(int(action))
        except ValueError:
            raise InvalidActionError(f"action must be 0..5, got {action!r}") from None
        self._pending_action = action

    def submit_questionnaire(self, answers: list[int]) -> bool:
        """Returns True when the session advanced to a new episode,
        False when the plan is exhausted."""
        if self.phase != PHASE_QUESTIONNAIRE:
            raise WrongPhaseError("no questionnaire is pending")
        expected = len(self.questionnaire_items())
        if len(answers) != expected:
            raise OutOfRangeAnswerError(
                f"expected {expected} answers, got {len(answers)}"
            )
        for value in answers:
            if not isinstance(value, int) or not 1 <= value <= 7:
                raise OutOfRangeAnswerError(f"answers must be integers 1..7, got {value!r}")
        self.log.questionnaire = dict(zip(self.questionnaire_items(), answers))
        self.logs.append(self.log)
        return self._advance()

    def questionnaire_items(self) -> list[str]:
        items = list(QUESTIONNAIRE_ITEMS)
        if self.config.group == GROUP_NONE:
            items.remove("predictor_satisfaction")
        return items

    def _advance(self) -> bool:
        next_index = self.episode_index + 1
        if next_index >= len(self.config.plan):
            self.phase = PHASE_DONE
            self._episode_active = False
            return False
        self._start_episode(next_index)
        return True

    # -- the tick ------------------------------------------------------------

    def tick(self) -> dict:
        """Advance one step and return the broadcast message."""
        if not self._episode_active:
            raise EpisodeOverError("episode is over")
        started = time.perf_counter()
        human = self._pending_action if self._pending_action is not None else Action.WAIT
        self._pending_action = None
        agent = self.agent.sample(self.state, 1, self.rng)
        joint = (human, agent)
        pre_state = self.state
        outcome = step(self.layout, pre_state, joint)

        displayed = self.current_prediction
        self._window.append((pre_state, joint))
        self.state = outcome.next_state
        self.tick_count += 1

        if self.is_tutorial and any(e.kind == DELIVERED for e in outcome.events):
            self._tutorial_passed = True
        # A passed tutorial ends immediately; real episodes run the clock out.
        ended = self.tick_count >= self._tick_limit() or (
            self.is_tutorial and self._tutorial_passed
        )
        if not ended:
            self.current_prediction = self._compute_prediction()
        else:
            self.current_prediction = None

        record = {
            "tick": self.tick_count - 1,
            "state": pre_state.to_dict(),
            "human_action": int(human),
            "agent_action": int(agent),
            "prediction": displayed,
            "events": [e.kind for e in outcome.events],
            "reward": outcome.reward,
            "wall_ms": 0.0,
        }
        self.log.ticks.append(record)

        # serialize the broadcast before closing the timing measurement:
        # the tick budget covers agent act + prediction + serialization
        message = self._finish_episode() if ended else self.state_message()
        record["wall_ms"] = (time.perf_counter() - started) * 1000.0
        return message

    def _tick_limit(self) -> int:
        return self.config.ticks_per_episode

    def _finish_episode(self) -> dict:
        self._episode_active = False
        delivery = float(self.state.cumulative_reward)
        final = delivery + terminal_bonus(self.state)
        self.log.delivery_reward = delivery
        self.log.final_reward = final
        if self.is_tutorial:
            if self._tutorial_passed:
                self.logs.append(self.log)
                self._start_episode(0)
                return {
                    "type": "tutorial_passed",
                    "schema": SCHEMA_VERSION,
                    "final_reward": final,
                }
            # failed tutorial: run it again
            self.logs.append(self.log)
            self._start_tutorial()
            return {
                "type": "tutorial_retry",
                "schema": SCHEMA_VERSION,
                "final_reward": final,
            }
        self.phase = PHASE_QUESTIONNAIRE
        return {
            "type": "episode_end",
            "schema": SCHEMA_VERSION,
            "reward": final,
            "delivery_reward": delivery,
            "episode": self.episode_index,
        }

    # -- predictions -----------------------------------------------------------

    def _compute_prediction(self) -> Optional[dict]:
        group = self.config.group
        if self.is_tutorial or group == GROUP_NONE:
            return None
        l = self.config.prediction_length
        if len(self._window) < self.config.history_length - 1:
            return {"warming_up": True, "actions": [], "cells": [], "confidence": []}
        if group == GROUP_RANDOM:
            actions = [int(a) for a in self.rng.integers(NUM_ACTIONS, size=l)]
            confidence = [1.0 / NUM_ACTIONS] * l
        elif self.predictor is not None:
            inference_started = time.perf_counter()
            sequence = self._model_prediction()
            inference_ms = (time.perf_counter() - inference_started) * 1000.0
            if inference_ms > self.config.predictor_budget_ms:
                # Overrun policy: never stall the tick clock; keep showing
                # the previous forecast and count the overrun.
                self.predictor_overruns += 1
                previous = self.current_prediction
                if previous and not previous.get("warming_up"):
                    stale = dict(previous)
                    stale["stale"] = True
                    return stale
            actions = [int(a) for a in sequence.argmax_actions]
            confidence = [float(c) for c in sequence.confidence]
        else:
            return None
        placements = project_positions(self.layout, self.state, actions, ego=1)
        return {
            "warming_up": False,
            "actions": actions,
            "cells": [[int(c[0][0]), int(c[0][1])] for c in placements],
            "orientations": [c[1].name[0] for c in placements],
            "confidence": confidence,
        }

    def _model_prediction(self):
        from ..data.windows import TrainingSample

        sample = TrainingSample(
            history=tuple(self._window),
            current_state=self.state,
            labels=tuple([0] * self.config.prediction_length),
            layout_id=self.layout.name,
            ego=1,
            trajectory_id="live",
            t=self.tick_count,
        )
        return self.predictor.predict(sample)

    # -- wire ------------------------------------------------------------------

    def state_message(self) -> dict:
        state = self.state
        return {
            "type": "state",
            "schema": SCHEMA_VERSION,
            "tick": self.tick_count,
            "players": [p.to_dict() for p in state.players],
            "pots": [p.to_dict() for p in state.pots],
            "counters": [[list(loc), item] for loc, item in state.counter_items],
            "score": int(state.cumulative_reward),
            "time_left_ticks": self._tick_limit() - self.tick_count,
            "prediction": self.current_prediction,
        }

    def episode_start_message(self) -> dict:
        return {
            "type": "episode_start",
            "schema": SCHEMA_VERSION,
            "episode": self.episode_index,
            "tutorial": self.is_tutorial,
            "layout": {
                "name": self.layout.name,
                "width": self.layout.width,
                "height": self.layout.height,
                "tiles": list(self.layout.tiles),
            },
            "agent_style": None if self.is_tutorial else self.config.plan[self.episode_index][1],
            "group": self.config.group,
            "ticks_per_episode": self._tick_limit(),
            "tick_rate": self.config.tick_rate,
        }

    def questionnaire_message(self) -> dict:
        return {
            "type": "questionnaire_request",
            "schema": SCHEMA_VERSION,
            "items": self.questionnaire_items(),
        }
