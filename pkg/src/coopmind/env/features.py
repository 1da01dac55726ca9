"""Grid-shaped feature encoding of game states.

One channel stack of shape ``(NUM_CHANNELS, height, width)`` per state
and ego player.  All values are in [0, 1] and the encoding is a pure
function of (layout, state, ego), so identical states always produce
identical tensors.  Swapping the ego index swaps exactly the
ego/partner channel pairs; tile, pot and counter channels are shared.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .layout import (
    COUNTER,
    DISH_DISPENSER,
    FLOOR,
    Layout,
    ONION_DISPENSER,
    POT,
    SERVING,
)
from .state import COOK_TIME, DISH, GameState, ONION, POT_CAPACITY, SOUP

TILE_CHANNELS = (FLOOR, COUNTER, ONION_DISPENSER, DISH_DISPENSER, POT, SERVING)
ITEM_CHANNELS = (ONION, DISH, SOUP)

CH_TILES = 0  # 6 channels, one per tile kind
CH_EGO_POS = 6
CH_PARTNER_POS = 7
CH_EGO_ORIENT = 8  # 4 channels (N, S, E, W)
CH_PARTNER_ORIENT = 12  # 4 channels
CH_EGO_HELD = 16  # 3 channels (onion, dish, soup)
CH_PARTNER_HELD = 19  # 3 channels
CH_POT_ONIONS = 22  # onion count / 3 at each pot cell
CH_POT_TIMER = 23  # cook_timer / 20 at each pot cell
CH_COUNTER_ITEMS = 24  # 3 channels (onion, dish, soup) on counters

NUM_CHANNELS = 27


@lru_cache(maxsize=64)
def _tile_planes(layout: Layout) -> np.ndarray:
    planes = np.zeros((len(TILE_CHANNELS), layout.height, layout.width), dtype=np.float64)
    for y in range(layout.height):
        for x in range(layout.width):
            planes[TILE_CHANNELS.index(layout.tiles[y][x]), y, x] = 1.0
    return planes


def featurize(layout: Layout, state: GameState, ego: int, dtype=np.float32) -> np.ndarray:
    """Encode ``state`` from the viewpoint of player ``ego`` (0 or 1)."""
    if ego not in (0, 1):
        raise ValueError(f"ego must be 0 or 1, got {ego}")
    tensor = np.zeros((NUM_CHANNELS, layout.height, layout.width), dtype=np.float64)
    tensor[CH_TILES : CH_TILES + len(TILE_CHANNELS)] = _tile_planes(layout)

    for role, (pos_ch, orient_ch, held_ch) in zip(
        (ego, 1 - ego),
        (
            (CH_EGO_POS, CH_EGO_ORIENT, CH_EGO_HELD),
            (CH_PARTNER_POS, CH_PARTNER_ORIENT, CH_PARTNER_HELD),
        ),
    ):
        player = state.players[role]
        x, y = player.position
        tensor[pos_ch, y, x] = 1.0
        tensor[orient_ch + int(player.orientation), y, x] = 1.0
        if player.holding is not None:
            tensor[held_ch + ITEM_CHANNELS.index(player.holding), y, x] = 1.0

    for pot in state.pots:
        x, y = pot.location
        tensor[CH_POT_ONIONS, y, x] = pot.onions / POT_CAPACITY
        tensor[CH_POT_TIMER, y, x] = pot.cook_timer / COOK_TIME

    for (x, y), item in state.counter_items:
        tensor[CH_COUNTER_ITEMS + ITEM_CHANNELS.index(item), y, x] = 1.0

    return tensor.astype(dtype)
