"""Two-player kitchen gridworld: layouts, transition rules, features."""

from .layout import (
    BUILTIN_LAYOUTS,
    BadStartPositionsError,
    COUNTER,
    DISH_DISPENSER,
    FLOOR,
    Layout,
    LayoutError,
    MissingRequiredTileError,
    NonRectangularError,
    ONION_DISPENSER,
    POT,
    SERVING,
    UnknownTileError,
    load_layout,
    parse_layout,
)
from .mdp import initial_state, replay, step, terminal_bonus
from .features import NUM_CHANNELS, featurize
from .state import (
    Action,
    COOK_TIME,
    DELIVERED,
    DELIVERY_REWARD,
    DISH,
    Event,
    GameState,
    JointAction,
    MOVE_BLOCKED,
    NUM_ACTIONS,
    ONION,
    Orientation,
    PlayerState,
    PotState,
    SOUP,
    StepOutcome,
    COOK_FINISHED,
    COOK_STARTED,
    PICKED_UP,
    PLACED,
    POT_CAPACITY,
)

__all__ = [
    "Action",
    "BUILTIN_LAYOUTS",
    "BadStartPositionsError",
    "COOK_FINISHED",
    "COOK_STARTED",
    "COOK_TIME",
    "COUNTER",
    "DELIVERED",
    "DELIVERY_REWARD",
    "DISH",
    "DISH_DISPENSER",
    "Event",
    "FLOOR",
    "GameState",
    "JointAction",
    "Layout",
    "LayoutError",
    "MOVE_BLOCKED",
    "MissingRequiredTileError",
    "NUM_ACTIONS",
    "NUM_CHANNELS",
    "NonRectangularError",
    "ONION",
    "ONION_DISPENSER",
    "Orientation",
    "PICKED_UP",
    "PLACED",
    "POT",
    "POT_CAPACITY",
    "PlayerState",
    "PotState",
    "SERVING",
    "SOUP",
    "StepOutcome",
    "UnknownTileError",
    "featurize",
    "initial_state",
    "load_layout",
    "parse_layout",
    "replay",
    "step",
    "terminal_bonus",
]
