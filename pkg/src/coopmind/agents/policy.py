"""Agent policy interface.

A policy maps (state, ego index) to a distribution over the six
actions.  Policies are immutable once constructed and act() is a pure
function of its arguments, so one instance can serve any number of
concurrent episodes.
"""

from __future__ import annotations

import abc

import numpy as np

from ..env.state import Action, GameState, NUM_ACTIONS


class Policy(abc.ABC):
    policy_id: str = "policy"

    @abc.abstractmethod
    def action_distribution(self, state: GameState, ego: int) -> np.ndarray:
        """Probability vector over the 6 actions (sums to 1)."""

    def act(self, state: GameState, ego: int, deterministic: bool = False) -> np.ndarray:
        dist = self.action_distribution(state, ego)
        if deterministic:
            point = np.zeros(NUM_ACTIONS)
            point[int(np.argmax(dist))] = 1.0
            return point
        return dist

    def sample(self, state: GameState, ego: int, rng: np.random.Generator,
               deterministic: bool = False) -> Action:
        dist = self.act(state, ego, deterministic=deterministic)
        if deterministic:
            return Action(int(np.argmax(dist)))
        return Action(int(rng.choice(NUM_ACTIONS, p=dist)))


class UniformRandomPolicy(Policy):
    def __init__(self):
        self.policy_id = "uniform_random"

    def action_distribution(self, state: GameState, ego: int) -> np.ndarray:
        return np.full(NUM_ACTIONS, 1.0 / NUM_ACTIONS)
