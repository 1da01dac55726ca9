"""Scripted kitchen policies.

Two styles stand in for differently-trained agents: ``egocentric``
plans as if alone (it will walk into and bump the other player), while
``partner_aware`` treats the partner's cell as an obstacle and detours.
Subgoal priority, in order: deliver held soup; dish out with a held
dish; load held onions into the pot missing the fewest onions; fetch a
dish once some pot will be done by the time it can be reached; fetch an
onion otherwise.

The whole decision is recomputed from the current state every step, so
a planner is a pure function of (state, ego) and safe to share across
episodes.  ``reaction_delay`` slows the agent down by gating planned
actions to every (delay+1)-th timestep, a stateless stand-in for slow
reactions.  With probability ``epsilon`` the emitted distribution mixes
toward uniform.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..env.layout import (
    COUNTER,
    DISH_DISPENSER,
    Layout,
    ONION_DISPENSER,
    POT,
    SERVING,
)
from ..env.state import (
    ACTION_ORIENTATIONS,
    Action,
    DISH,
    GameState,
    MOVE_ACTIONS,
    NUM_ACTIONS,
    ONION,
    POT_CAPACITY,
    SOUP,
    move_target,
)


from .pathing import (
    DIRECTION_ORDER,
    HORIZONTAL_FIRST,
    UnreachableError,
    astar_path,
    can_interact_with,
)
from .policy import Policy

EGOCENTRIC = "egocentric"
PARTNER_AWARE = "partner_aware"
STYLES = (EGOCENTRIC, PARTNER_AWARE)


def _adjacent(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


class NoPathToAnySubgoalError(ValueError):
    pass


@dataclass(frozen=True)
class PlannerParams:
    style: str = PARTNER_AWARE
    epsilon: float = 0.0
    reaction_delay: int = 0
    tie_break: str = HORIZONTAL_FIRST

    def __post_init__(self):
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.reaction_delay < 0:
            raise ValueError("reaction_delay must be >= 0")

    def to_mapping(self) -> dict:
        return {
            "style": self.style,
            "epsilon": self.epsilon,
            "reaction_delay": self.reaction_delay,
            "tie_break": self.tie_break,
        }

    @classmethod
    def from_mapping(cls, d: dict) -> "PlannerParams":
        return cls(
            style=d["style"],
            epsilon=float(d["epsilon"]),
            reaction_delay=int(d["reaction_delay"]),
            tie_break=d["tie_break"],
        )


def parse_planner_params(text: str) -> PlannerParams:
    """Parse a `key = value` planner config file."""
    values = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return PlannerParams.from_mapping(values)


def format_planner_params(params: PlannerParams) -> str:
    return "".join(f"{k} = {v}\n" for k, v in params.to_mapping().items())


class ScriptedPlanner(Policy):
    def __init__(self, layout: Layout, params: PlannerParams, policy_id: str | None = None):
        self.layout = layout
        self.params = params
        self.policy_id = policy_id or (
            f"{params.style}_e{params.epsilon:g}_d{params.reaction_delay}_{params.tie_break}"
        )
        self._check_usable()
        # Planning is a pure function of its arguments; memoize it, the
        # same board positions recur constantly within an episode.
        self._plan = lru_cache(maxsize=100_000)(self._planned_action)

    def _check_usable(self):
        layout = self.layout
        for start in layout.start_positions:
            def reach(kind):
                return any(can_interact_with(layout, start, c) for c in layout.cells_of(kind))

            cook_chain = reach(ONION_DISPENSER) and reach(POT)
            serve_chain = reach(DISH_DISPENSER) and reach(POT) and reach(SERVING)
            if not (cook_chain or serve_chain):
                raise NoPathToAnySubgoalError(
                    f"start {start} on {layout.name!r} cannot reach a useful subgoal chain"
                )

    def action_distribution(self, state: GameState, ego: int) -> np.ndarray:
        if self.params.epsilon >= 1.0:
            return np.full(NUM_ACTIONS, 1.0 / NUM_ACTIONS)
        delay = self.params.reaction_delay
        if delay > 0 and state.timestep % (delay + 1) != 0:
            planned = Action.WAIT
        else:
            # Deterministic contention breaking for the partner-aware
            # style: when a move is contested (see _go_interact), player
            # 0 pushes on 3 of 4 timesteps and player 1 on 1 of 4, so
            # mirrored copies never stay locked in step.  Derived purely
            # from (timestep, ego), keeping act() a pure function.
            t = state.timestep
            push_turn = (t % 4 != 3) if ego == 0 else (t % 4 == 1)
            planned = self._plan(
                state.players[ego], state.players[1 - ego], state.pots,
                state.counter_items, push_turn,
            )
        dist = np.full(NUM_ACTIONS, self.params.epsilon / NUM_ACTIONS)
        dist[int(planned)] += 1.0 - self.params.epsilon
        return dist

    # -- subgoal machinery ------------------------------------------------

    def _planned_action(self, me, partner, pots, counter_items, push_turn) -> Action:
        layout = self.layout
        if self.params.style == PARTNER_AWARE:
            occupied = frozenset({partner.position})
        else:
            occupied = frozenset()

        def go(targets):
            return self._go_interact(me, targets, occupied, partner, push_turn)

        if me.holding == SOUP:
            return go(layout.cells_of(SERVING))
        if me.holding == DISH:
            loaded = [p for p in pots if p.onions == POT_CAPACITY]
            if loaded:
                target_pot = min(loaded, key=lambda p: (p.cook_timer, p.location))
                action = go((target_pot.location,))
                if action == Action.INTERACT and not target_pot.is_ready:
                    return Action.WAIT  # in position, soup still cooking
                return action
            fullest = max(pots, key=lambda p: (p.onions, p.location), default=None)
            if fullest is not None:
                action = go((fullest.location,))
                return Action.WAIT if action == Action.INTERACT else action
            return Action.WAIT
        if me.holding == ONION:
            fillable = [p for p in pots if p.onions < POT_CAPACITY]
            if fillable:
                most_full = max(p.onions for p in fillable)
                targets = tuple(p.location for p in fillable if p.onions == most_full)
                return go(targets)
            # All pots are cooking; park the onion on a free counter.
            taken = {loc for loc, _ in counter_items}
            free = tuple(c for c in layout.cells_of(COUNTER) if c not in taken)
            if free:
                return go(free)
            return Action.WAIT

        # Empty hands: fetch a dish if some cooked soup will be ready by
        # the time we can get a dish to its pot, else go fill pots.
        if self._dish_worthwhile(me, pots, occupied):
            return go(layout.cells_of(DISH_DISPENSER))
        if any(p.onions < POT_CAPACITY for p in pots):
            return go(layout.cells_of(ONION_DISPENSER))
        return go(layout.cells_of(DISH_DISPENSER))

    def _dish_worthwhile(self, me, pots, occupied) -> bool:
        loaded = [p for p in pots if p.onions == POT_CAPACITY]
        if not loaded:
            return False
        if any(p.is_ready for p in loaded):
            return True
        dispensers = self.layout.cells_of(DISH_DISPENSER)
        for pot in loaded:
            eta = self._trip_eta(me, dispensers, pot.location, occupied)
            if eta is not None and pot.cook_timer <= eta:
                return True
        return False

    def _trip_eta(self, me, dispensers, pot_location, occupied):
        """Steps to reach a dish dispenser and then stand at the pot."""
        best = None
        for disp in dispensers:
            first = self._path(me.position, me.orientation, disp, occupied)
            if first is None:
                continue
            # Second leg starts from wherever the first leg ended.
            cell, orient = self._walk(me.position, me.orientation, first, occupied)
            second = self._path(cell, orient, pot_location, occupied)
            if second is None:
                continue
            total = len(first) + 1 + len(second)  # +1 for the pickup interact
            if best is None or total < best:
                best = total
        return best

    def _walk(self, position, orientation, path, occupied):
        """End (cell, orientation) after following ``path``, mirroring the
        A* transition rule."""
        cell, orient = position, orientation
        for action in path:
            nbr = move_target(cell, action)
            orient = ACTION_ORIENTATIONS[action]
            if self.layout.is_floor(nbr) and nbr not in occupied:
                cell = nbr
        return cell, orient

    def _go_interact(self, me, targets, occupied, partner, push_turn) -> Action:
        """First action of the shortest path to any target; INTERACT when
        already in position.

        The partner-aware style defuses two contested-move situations on
        its non-push turns: walking straight into the partner (guaranteed
        blocked; step aside instead to free this cell) and steering into
        a free cell the partner is facing (likely same-target conflict;
        hold for a turn).  The egocentric style never checks."""
        best = None
        for target in targets:
            path = self._path(me.position, me.orientation, target, occupied)
            if path is None and occupied:
                path = self._path(me.position, me.orientation, target, frozenset())
            if path is None:
                continue
            key = (len(path), target)
            if best is None or key < best[0]:
                best = (key, path)
        if best is None:
            return Action.WAIT
        path = best[1]
        if not path:
            return Action.INTERACT
        if self.params.style == PARTNER_AWARE and path[0] in MOVE_ACTIONS:
            intended = move_target(me.position, path[0])
            if intended == partner.position:
                return path[0] if push_turn else self._step_aside(me, partner.position)
            contested = (
                _adjacent(intended, partner.position)
                and partner.facing() == intended
            )
            if contested and not push_turn:
                return Action.WAIT
        return path[0]

    def _step_aside(self, me, partner_pos) -> Action:
        for action in DIRECTION_ORDER[self.params.tie_break]:
            nbr = move_target(me.position, action)
            if self.layout.is_floor(nbr) and nbr != partner_pos:
                return action
        return Action.WAIT

    def _path(self, position, orientation, target, occupied):
        try:
            return astar_path(
                self.layout, position, orientation, target, occupied,
                self.params.tie_break,
            )
        except UnreachableError:
            return None


def planner_policy(layout: Layout, params: PlannerParams, policy_id: str | None = None) -> ScriptedPlanner:
    """Construct a scripted policy; raises NoPathToAnySubgoalError when a
    start position cannot reach any useful subgoal chain."""
    return ScriptedPlanner(layout, params, policy_id)


def default_families(count: int = 5, epsilon_base: float = 0.0) -> list[PlannerParams]:
    """A small diverse set of planner bases used as partner families.

    Egocentric bases get a noise floor: two deterministic egocentric
    copies can lock each other out of a shared cell forever, and a
    family must score above zero in self-play to be skill-graded."""
    families = []
    for i in range(count):
        style = PARTNER_AWARE if i % 2 == 0 else EGOCENTRIC
        epsilon = min(1.0, epsilon_base + 0.03 * i)
        if style == EGOCENTRIC:
            epsilon = max(epsilon, 0.05)
        families.append(
            PlannerParams(
                style=style,
                epsilon=epsilon,
                reaction_delay=0,
                tie_break=HORIZONTAL_FIRST if i % 3 else "vertical_first",
            )
        )
    return families
