"""Grid path planning to interaction targets.

A path ends *adjacent to and facing* the target tile, so the final
element may be a move action that only turns the player (bump moves
against non-floor cells update orientation without moving).  Search
states are (cell, orientation) pairs; every action costs 1.
"""

from __future__ import annotations

import heapq

from ..env.layout import Layout
from ..env.state import (
    ACTION_ORIENTATIONS,
    Action,
    Orientation,
    move_target,
)

HORIZONTAL_FIRST = "horizontal_first"
VERTICAL_FIRST = "vertical_first"

DIRECTION_ORDER = {
    HORIZONTAL_FIRST: (Action.LEFT, Action.RIGHT, Action.UP, Action.DOWN),
    VERTICAL_FIRST: (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT),
}


class UnreachableError(ValueError):
    pass


def astar_path(
    layout: Layout,
    start: tuple[int, int],
    orientation: Orientation,
    target: tuple[int, int],
    occupied: frozenset = frozenset(),
    tie_break: str = HORIZONTAL_FIRST,
) -> tuple[Action, ...]:
    """Shortest action sequence from (start, orientation) to a state
    adjacent to ``target`` and facing it.  ``occupied`` floor cells are
    treated as obstacles.  Ties are broken deterministically by the
    direction preference, earlier-expanded states winning."""
    if not layout.is_floor(start):
        raise UnreachableError(f"start {start} is not a floor cell")
    order = DIRECTION_ORDER[tie_break]

    def done(cell, orient):
        return move_target(cell, _ORIENT_ACTION[orient]) == target

    def heuristic(cell):
        dist = abs(cell[0] - target[0]) + abs(cell[1] - target[1])
        return max(dist - 1, 0)

    start_state = (start, orientation)
    if done(*start_state):
        return ()

    counter = 0
    frontier = [(heuristic(start), 0, counter, start_state)]
    best_cost = {start_state: 0}
    came_from: dict = {}
    while frontier:
        _, cost, _, state = heapq.heappop(frontier)
        if cost > best_cost.get(state, cost):
            continue
        if done(*state):
            actions = []
            back = state
            while back != start_state:
                back, action = came_from[back]
                actions.append(action)
            return tuple(reversed(actions))
        cell, orient = state
        for action in order:
            nbr = move_target(cell, action)
            new_orient = ACTION_ORIENTATIONS[action]
            enterable = layout.is_floor(nbr) and nbr not in occupied
            next_state = (nbr, new_orient) if enterable else (cell, new_orient)
            next_cost = cost + 1
            if next_cost < best_cost.get(next_state, float("inf")):
                best_cost[next_state] = next_cost
                came_from[next_state] = (state, action)
                counter += 1
                heapq.heappush(
                    frontier, (next_cost + heuristic(nbr), next_cost, counter, next_state)
                )
    raise UnreachableError(f"no path from {start} to a cell facing {target}")


_ORIENT_ACTION = {
    Orientation.NORTH: Action.UP,
    Orientation.SOUTH: Action.DOWN,
    Orientation.EAST: Action.RIGHT,
    Orientation.WEST: Action.LEFT,
}


def path_length(layout, start, orientation, target, occupied=frozenset(), tie_break=HORIZONTAL_FIRST):
    """len(astar_path(...)), or None when unreachable."""
    try:
        return len(astar_path(layout, start, orientation, target, occupied, tie_break))
    except UnreachableError:
        return None


def reachable_cells(layout: Layout, start: tuple[int, int]) -> frozenset:
    """Floor cells reachable from ``start`` by moves (no occupancy)."""
    seen = {start}
    stack = [start]
    while stack:
        cell = stack.pop()
        for action in DIRECTION_ORDER[HORIZONTAL_FIRST]:
            nbr = move_target(cell, action)
            if layout.is_floor(nbr) and nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return frozenset(seen)


def can_interact_with(layout: Layout, start: tuple[int, int], target: tuple[int, int]) -> bool:
    """True when some reachable floor cell is adjacent to ``target``."""
    cells = reachable_cells(layout, start)
    for action in DIRECTION_ORDER[HORIZONTAL_FIRST]:
        if move_target(target, action) in cells:
            return True
    return False
