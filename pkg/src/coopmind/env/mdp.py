"""Deterministic transition, reward and end-of-episode accounting.

The step order is: tick the pots that were already cooking, resolve
both movements simultaneously, then resolve interactions (player 0
first).  All six actions are always legal; actions that cannot take
effect are silent no-ops.

Movement rule: a move sets the player's orientation and advances one
cell iff the target cell is floor, is not the other player's current
cell, and is not the cell the other player is moving into this step.
That single rule blocks same-target conflicts, swaps, and trailing the
other player through the cell it vacates.
"""

from __future__ import annotations

from dataclasses import replace

from .layout import COUNTER, DISH_DISPENSER, FLOOR, Layout, ONION_DISPENSER, POT, SERVING
from .state import (
    ACTION_ORIENTATIONS,
    COOK_FINISHED,
    COOK_STARTED,
    COOK_TIME,
    DELIVERED,
    DELIVERY_REWARD,
    DISH,
    Event,
    GameState,
    JointAction,
    MOVE_ACTIONS,
    MOVE_BLOCKED,
    ONION,
    PICKED_UP,
    PLACED,
    POT_CAPACITY,
    PlayerState,
    PotState,
    SOUP,
    StepOutcome,
    Action,
    move_target,
)

# Per-pot terminal credit: each onion in the pot, plus a full-cook bonus
# scaled by progress.  Per-player credit for items in hand.  Calibrated
# to stay strictly below one delivery (20) for any in-progress chain.
BONUS_PER_ONION = 2.0
BONUS_COOK_PROGRESS = 8.0
BONUS_HELD_SOUP = 12.0
BONUS_HELD_DISH = 2.0


def initial_state(layout: Layout) -> GameState:
    players = tuple(
        PlayerState(position=pos, orientation=orient)
        for pos, orient in zip(layout.start_positions, layout.start_orientations)
    )
    pots = tuple(PotState(location=loc) for loc in layout.cells_of(POT))
    return GameState(timestep=0, players=players, pots=pots)


def step(layout: Layout, state: GameState, action: JointAction) -> StepOutcome:
    a0, a1 = Action(action[0]), Action(action[1])
    actions = (a0, a1)
    events: list[Event] = []

    # Pots that were cooking at the start of the step tick down; a pot
    # loaded this step keeps its full timer until the next step.
    pots = {}
    for pot in state.pots:
        if pot.cook_timer > 0:
            pot = replace(pot, cook_timer=pot.cook_timer - 1)
            if pot.cook_timer == 0:
                events.append(Event(COOK_FINISHED, pot=pot.location))
        pots[pot.location] = pot

    # Simultaneous movement resolution.
    old_pos = [p.position for p in state.players]
    desired = list(old_pos)
    moving = [False, False]
    for i, act in enumerate(actions):
        if act in MOVE_ACTIONS:
            moving[i] = True
            target = move_target(old_pos[i], act)
            if layout.tile(*target) == FLOOR:
                desired[i] = target

    new_pos = list(old_pos)
    for i in range(2):
        j = 1 - i
        if desired[i] != old_pos[i] and desired[i] != old_pos[j] and desired[i] != desired[j]:
            new_pos[i] = desired[i]

    players = []
    for i, act in enumerate(actions):
        player = state.players[i]
        if moving[i]:
            player = replace(
                player,
                position=new_pos[i],
                orientation=ACTION_ORIENTATIONS[act],
            )
            if new_pos[i] == old_pos[i]:
                events.append(Event(MOVE_BLOCKED, player=i))
        players.append(player)

    # Interactions, player 0 first so simultaneous use of one tile is
    # deterministic.
    counter_items = dict(state.counter_items)
    reward = 0.0
    for i, act in enumerate(actions):
        if act != Action.INTERACT:
            continue
        player = players[i]
        faced = player.facing()
        tile = layout.tile(*faced)
        held = player.holding

        if tile == ONION_DISPENSER and held is None:
            players[i] = replace(player, holding=ONION)
            events.append(Event(PICKED_UP, player=i, item=ONION))
        elif tile == DISH_DISPENSER and held is None:
            players[i] = replace(player, holding=DISH)
            events.append(Event(PICKED_UP, player=i, item=DISH))
        elif tile == POT:
            pot = pots[faced]
            if held == ONION and pot.onions < POT_CAPACITY:
                pot = replace(pot, onions=pot.onions + 1)
                players[i] = replace(player, holding=None)
                events.append(Event(PLACED, player=i, item=ONION, pot=faced))
                if pot.onions == POT_CAPACITY:
                    pot = replace(pot, cook_timer=COOK_TIME)
                    events.append(Event(COOK_STARTED, pot=faced))
                pots[faced] = pot
            elif held == DISH and pot.is_ready:
                pots[faced] = PotState(location=faced)
                players[i] = replace(player, holding=SOUP)
                events.append(Event(PICKED_UP, player=i, item=SOUP, pot=faced))
        elif tile == SERVING and held == SOUP:
            players[i] = replace(player, holding=None)
            reward += DELIVERY_REWARD
            events.append(Event(DELIVERED, player=i))
        elif tile == COUNTER:
            if held is not None and faced not in counter_items:
                counter_items[faced] = held
                players[i] = replace(player, holding=None)
                events.append(Event(PLACED, player=i, item=held))
            elif held is None and faced in counter_items:
                item = counter_items.pop(faced)
                players[i] = replace(player, holding=item)
                events.append(Event(PICKED_UP, player=i, item=item))

    next_state = GameState(
        timestep=state.timestep + 1,
        players=(players[0], players[1]),
        pots=tuple(pots[loc] for loc in sorted(pots)),
        counter_items=tuple(sorted(counter_items.items())),
        cumulative_reward=state.cumulative_reward + reward,
    )
    return StepOutcome(next_state=next_state, reward=reward, events=tuple(events))


def terminal_bonus(state: GameState) -> float:
    """Partial credit for soup work still in flight when the game ends."""
    total = 0.0
    for pot in state.pots:
        total += BONUS_PER_ONION * pot.onions
        total += BONUS_COOK_PROGRESS * pot.cook_progress
    for player in state.players:
        if player.holding == SOUP:
            total += BONUS_HELD_SOUP
        elif player.holding == DISH:
            total += BONUS_HELD_DISH
    return total


def replay(layout: Layout, actions: list[JointAction]) -> list[GameState]:
    """States visited when folding ``step`` over an action sequence,
    including the initial state (length ``len(actions) + 1``)."""
    states = [initial_state(layout)]
    for action in actions:
        states.append(step(layout, states[-1], action).next_state)
    return states
