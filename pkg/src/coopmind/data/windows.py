"""Fixed-window training samples.

A sample anchored at step t carries the previous n-1 (state, action)
pairs, the current state s_t, and the target agent's next l actions as
labels, the first label being the action taken *at* t (the model never
sees the current step's action; its input slot is zeroed).  Only full
windows are emitted: t ranges over [n-1, T-l-1], so a trajectory of T
steps yields T - n - l + 1 samples and short episodes yield none.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..env.state import GameState, JointAction, NUM_ACTIONS
from .trajectory import Dataset, Trajectory

JOINT_ONEHOT_DIM = 2 * NUM_ACTIONS


def joint_action_onehot(action: JointAction) -> np.ndarray:
    """12-dim concatenation of the two players' 6-dim one-hots."""
    vec = np.zeros(JOINT_ONEHOT_DIM)
    vec[int(action[0])] = 1.0
    vec[NUM_ACTIONS + int(action[1])] = 1.0
    return vec


@dataclass
class TrainingSample:
    history: tuple[tuple[GameState, JointAction], ...]  # n-1 pairs
    current_state: GameState
    labels: tuple[int, ...]  # l target-agent actions, labels[0] is "now"
    layout_id: str
    ego: int  # the target agent's seat
    trajectory_id: str
    t: int  # index of current_state in its trajectory

    @property
    def n(self) -> int:
        return len(self.history) + 1

    @property
    def current_action_input(self) -> np.ndarray:
        """The zeroed action slot fed alongside the current state."""
        return np.zeros(JOINT_ONEHOT_DIM)

    def states(self) -> list[GameState]:
        return [s for s, _ in self.history] + [self.current_state]

    def action_inputs(self) -> np.ndarray:
        """(n, 12) matrix of joint-action one-hots, last row zero."""
        rows = [joint_action_onehot(a) for _, a in self.history]
        rows.append(self.current_action_input)
        return np.stack(rows)


def trajectory_samples(trajectory: Trajectory, n: int = 10, l: int = 3) -> Iterator[TrainingSample]:
    if n < 1 or l < 1:
        raise ValueError("n and l must be >= 1")
    records = trajectory.records
    horizon = len(records)
    for t in range(n - 1, horizon - l):
        yield TrainingSample(
            history=tuple(records[t - n + 1 : t]),
            current_state=records[t][0],
            labels=tuple(trajectory.target_action(t + i) for i in range(l)),
            layout_id=trajectory.layout_id,
            ego=trajectory.settings.target_role,
            trajectory_id=trajectory.trajectory_id,
            t=t,
        )


def make_samples(
    dataset: Dataset, n: int = 10, l: int = 3, split: str | None = None
) -> Iterator[TrainingSample]:
    """Stream samples over a dataset, optionally restricted to a split."""
    trajectories = dataset.trajectories if split is None else dataset.in_split(split)
    for trajectory in trajectories:
        yield from trajectory_samples(trajectory, n=n, l=l)
