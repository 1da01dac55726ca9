"""Placement of predicted actions on the grid for the display overlay."""

from __future__ import annotations

from ..env.layout import Layout
from ..env.state import (
    ACTION_ORIENTATIONS,
    Action,
    GameState,
    MOVE_ACTIONS,
    Orientation,
    move_target,
)


def project_positions(
    layout: Layout, state: GameState, actions, ego: int
) -> list[tuple[tuple[int, int], Orientation]]:
    """Where each predicted step would put the ego player.

    Simulates the ego player alone with the partner frozen in place:
    blocked moves keep the position but still turn the player, matching
    the real movement rule."""
    position = state.players[ego].position
    orientation = state.players[ego].orientation
    partner = state.players[1 - ego].position
    placements = []
    for action in actions:
        action = Action(action)
        if action in MOVE_ACTIONS:
            orientation = ACTION_ORIENTATIONS[action]
            target = move_target(position, action)
            if layout.is_floor(target) and target != partner:
                position = target
        placements.append((position, orientation))
    return placements
