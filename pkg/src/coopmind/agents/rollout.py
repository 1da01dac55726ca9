"""Seeded episode rollouts between two policies."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..env.layout import Layout
from ..env.mdp import initial_state, step, terminal_bonus
from ..env.state import GameState, JointAction
from .policy import Policy


@dataclass
class RolloutResult:
    records: list[tuple[GameState, JointAction]]
    final_state: GameState
    reward: float  # cumulative delivery reward
    bonus: float  # end-of-episode partial credit


def rollout_episode(
    layout: Layout,
    policies: tuple[Policy, Policy],
    horizon: int,
    rng: np.random.Generator,
    deterministic: tuple[bool, bool] = (False, False),
) -> RolloutResult:
    """Run one episode; ``policies[i]`` controls player ``i``."""
    state = initial_state(layout)
    records = []
    for _ in range(horizon):
        joint = (
            policies[0].sample(state, 0, rng, deterministic=deterministic[0]),
            policies[1].sample(state, 1, rng, deterministic=deterministic[1]),
        )
        records.append((state, joint))
        state = step(layout, state, joint).next_state
    return RolloutResult(
        records=records,
        final_state=state,
        reward=state.cumulative_reward,
        bonus=terminal_bonus(state),
    )


def episode_rng(seed, *stream) -> np.random.Generator:
    """Independent generator for one rollout, derived from a base seed
    plus stream identifiers.  Uses a stable digest (not ``hash()``,
    which is salted per process) so runs reproduce across processes."""
    digest = hashlib.sha256(repr(stream).encode("utf-8")).digest()
    spawn = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence((seed, spawn)))
