"""Value types for the two-player kitchen gridworld.

Everything here is an immutable value object: states can be hashed,
compared, snapshotted into logs, and re-created from JSON without any
hidden context.  All coordinates are ``(x, y)`` with ``x`` the column
and ``y`` the row, origin at the top-left.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional

COOK_TIME = 20
POT_CAPACITY = 3
DELIVERY_REWARD = 20.0

# Held / placed item kinds.
ONION = "onion"
DISH = "dish"
SOUP = "soup"
ITEMS = (ONION, DISH, SOUP)


class Action(IntEnum):
    """The six player actions, with a stable integer encoding."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    INTERACT = 4
    WAIT = 5


MOVE_ACTIONS = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)
NUM_ACTIONS = len(Action)


class Orientation(IntEnum):
    NORTH = 0
    SOUTH = 1
    EAST = 2
    WEST = 3


ORIENTATION_LETTERS = {
    Orientation.NORTH: "N",
    Orientation.SOUTH: "S",
    Orientation.EAST: "E",
    Orientation.WEST: "W",
}
LETTER_ORIENTATIONS = {v: k for k, v in ORIENTATION_LETTERS.items()}

# Unit displacement for each orientation; NORTH is up the grid (y - 1).
ORIENTATION_DELTAS = {
    Orientation.NORTH: (0, -1),
    Orientation.SOUTH: (0, 1),
    Orientation.EAST: (1, 0),
    Orientation.WEST: (-1, 0),
}

ACTION_ORIENTATIONS = {
    Action.UP: Orientation.NORTH,
    Action.DOWN: Orientation.SOUTH,
    Action.LEFT: Orientation.WEST,
    Action.RIGHT: Orientation.EAST,
}


def move_target(position: tuple[int, int], action: Action) -> tuple[int, int]:
    """Cell a move action points at (the cell may not be enterable)."""
    dx, dy = ORIENTATION_DELTAS[ACTION_ORIENTATIONS[Action(action)]]
    return (position[0] + dx, position[1] + dy)


JointAction = tuple[Action, Action]


@dataclass(frozen=True)
class PlayerState:
    position: tuple[int, int]
    orientation: Orientation
    holding: Optional[str] = None

    def facing(self) -> tuple[int, int]:
        dx, dy = ORIENTATION_DELTAS[self.orientation]
        return (self.position[0] + dx, self.position[1] + dy)

    def to_dict(self) -> dict:
        return {
            "pos": list(self.position),
            "orientation": ORIENTATION_LETTERS[self.orientation],
            "holding": self.holding,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlayerState":
        return cls(
            position=tuple(d["pos"]),
            orientation=LETTER_ORIENTATIONS[d["orientation"]],
            holding=d["holding"],
        )


@dataclass(frozen=True)
class PotState:
    """One pot.  Cooking auto-starts at 3 onions, so a pot with a full
    load and a zero timer has necessarily finished cooking."""

    location: tuple[int, int]
    onions: int = 0
    cook_timer: int = 0

    @property
    def is_cooking(self) -> bool:
        return self.onions == POT_CAPACITY and self.cook_timer > 0

    @property
    def is_ready(self) -> bool:
        return self.onions == POT_CAPACITY and self.cook_timer == 0

    @property
    def cook_progress(self) -> float:
        """Fraction of the cook completed, 0.0 for a pot still filling."""
        if self.onions < POT_CAPACITY:
            return 0.0
        return (COOK_TIME - self.cook_timer) / COOK_TIME

    def to_dict(self) -> dict:
        return {"pos": list(self.location), "onions": self.onions, "cook_timer": self.cook_timer}

    @classmethod
    def from_dict(cls, d: dict) -> "PotState":
        return cls(location=tuple(d["pos"]), onions=d["onions"], cook_timer=d["cook_timer"])


@dataclass(frozen=True)
class GameState:
    """Full game snapshot.  A deterministic function of the layout and
    the joint-action history, so replaying logged actions reproduces a
    logged state exactly.

    ``counter_items`` holds at most one item per counter cell, stored as
    a sorted tuple of ``((x, y), item)`` pairs so that equal states
    compare and hash equal.
    """

    timestep: int
    players: tuple[PlayerState, PlayerState]
    pots: tuple[PotState, ...]
    counter_items: tuple[tuple[tuple[int, int], str], ...] = ()
    cumulative_reward: float = 0.0

    def player(self, idx: int) -> PlayerState:
        return self.players[idx]

    def pot_at(self, location: tuple[int, int]) -> Optional[PotState]:
        for pot in self.pots:
            if pot.location == location:
                return pot
        return None

    def counter_item(self, location: tuple[int, int]) -> Optional[str]:
        for loc, item in self.counter_items:
            if loc == location:
                return item
        return None

    def to_dict(self) -> dict:
        return {
            "timestep": self.timestep,
            "players": [p.to_dict() for p in self.players],
            "pots": [p.to_dict() for p in self.pots],
            "counter_items": [[list(loc), item] for loc, item in self.counter_items],
            "cumulative_reward": self.cumulative_reward,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameState":
        return cls(
            timestep=d["timestep"],
            players=tuple(PlayerState.from_dict(p) for p in d["players"]),
            pots=tuple(PotState.from_dict(p) for p in d["pots"]),
            counter_items=tuple((tuple(loc), item) for loc, item in d["counter_items"]),
            cumulative_reward=d["cumulative_reward"],
        )


# Step event kinds.
DELIVERED = "delivered"
PICKED_UP = "picked_up"
PLACED = "placed"
MOVE_BLOCKED = "move_blocked"
COOK_STARTED = "cook_started"
COOK_FINISHED = "cook_finished"


@dataclass(frozen=True)
class Event:
    kind: str
    player: Optional[int] = None
    item: Optional[str] = None
    pot: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class StepOutcome:
    next_state: GameState
    reward: float
    events: tuple[Event, ...]


def with_holding(player: PlayerState, item: Optional[str]) -> PlayerState:
    return replace(player, holding=item)
