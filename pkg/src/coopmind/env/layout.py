"""Kitchen layouts: the grid of tiles plus fixed start placements.

Layout files are plain UTF-8 text: two header lines followed by the
grid, one character per cell::

    name: coordination_ring
    starts: 1,2,E 3,1,W
    XXXPX
    X...P
    D.X.X
    O...X
    XOSXX

Characters: ``.`` floor, ``X`` counter, ``O`` onion dispenser, ``D``
dish dispenser, ``P`` pot, ``S`` serving window.  Start entries are
``x,y,o`` with orientation letter N/S/E/W; the first entry is player 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .state import LETTER_ORIENTATIONS, Orientation

FLOOR = "."
COUNTER = "X"
ONION_DISPENSER = "O"
DISH_DISPENSER = "D"
POT = "P"
SERVING = "S"

TILE_KINDS = (FLOOR, COUNTER, ONION_DISPENSER, DISH_DISPENSER, POT, SERVING)
REQUIRED_TILES = (POT, ONION_DISPENSER, DISH_DISPENSER, SERVING)

BUILTIN_LAYOUTS = (
    "coordination_ring",
    "double_rings",
    "double_counters",
    "matrix",
    "clear_division",
    "tutorial",
)


class LayoutError(ValueError):
    """Base class for layout parsing/validation failures."""


class UnknownTileError(LayoutError):
    def __init__(self, char: str, row: int, col: int):
        super().__init__(f"unknown tile {char!r} at row {row}, col {col}")
        self.char, self.row, self.col = char, row, col


class NonRectangularError(LayoutError):
    pass


class MissingRequiredTileError(LayoutError):
    def __init__(self, kind: str):
        super().__init__(f"layout has no {kind!r} tile")
        self.kind = kind


class BadStartPositionsError(LayoutError):
    pass


@dataclass(frozen=True)
class Layout:
    name: str
    width: int
    height: int
    tiles: tuple[str, ...]  # one string per row
    start_positions: tuple[tuple[int, int], tuple[int, int]]
    start_orientations: tuple[Orientation, Orientation]

    def tile(self, x: int, y: int) -> str:
        if 0 <= x < self.width and 0 <= y < self.height:
            return self.tiles[y][x]
        return COUNTER  # out of bounds acts like a wall

    def is_floor(self, cell: tuple[int, int]) -> bool:
        return self.tile(*cell) == FLOOR

    def cells_of(self, kind: str) -> tuple[tuple[int, int], ...]:
        return tuple(
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.tiles[y][x] == kind
        )

    def to_text(self) -> str:
        starts = " ".join(
            f"{p[0]},{p[1]},{o.name[0]}"
            for p, o in zip(self.start_positions, self.start_orientations)
        )
        return f"name: {self.name}\nstarts: {starts}\n" + "\n".join(self.tiles) + "\n"


def parse_layout(text: str) -> Layout:
    name = None
    starts_line = None
    grid_rows: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("name:"):
            name = stripped[len("name:"):].strip()
        elif stripped.startswith("starts:"):
            starts_line = stripped[len("starts:"):].strip()
        else:
            grid_rows.append(stripped)

    if name is None:
        raise LayoutError("missing 'name:' header line")
    if starts_line is None:
        raise LayoutError("missing 'starts:' header line")
    if not grid_rows:
        raise LayoutError("layout has no grid rows")

    width = len(grid_rows[0])
    for r, row in enumerate(grid_rows):
        if len(row) != width:
            raise NonRectangularError(
                f"row {r} has length {len(row)}, expected {width}"
            )
        for c, char in enumerate(row):
            if char not in TILE_KINDS:
                raise UnknownTileError(char, r, c)
    height = len(grid_rows)
    tiles = tuple(grid_rows)

    for kind in REQUIRED_TILES:
        if not any(kind in row for row in tiles):
            raise MissingRequiredTileError(kind)

    # Every boundary cell must be non-floor so players cannot leave.
    for x in range(width):
        if tiles[0][x] == FLOOR or tiles[height - 1][x] == FLOOR:
            raise LayoutError("boundary cells must be non-floor")
    for y in range(height):
        if tiles[y][0] == FLOOR or tiles[y][width - 1] == FLOOR:
            raise LayoutError("boundary cells must be non-floor")

    entries = starts_line.split()
    if len(entries) != 2:
        raise BadStartPositionsError(f"expected 2 start entries, got {len(entries)}")
    positions = []
    orientations = []
    for entry in entries:
        parts = entry.split(",")
        if len(parts) != 3:
            raise BadStartPositionsError(f"malformed start entry {entry!r}")
        try:
            x, y = int(parts[0]), int(parts[1])
        except ValueError:
            raise BadStartPositionsError(f"malformed start entry {entry!r}") from None
        if parts[2] not in LETTER_ORIENTATIONS:
            raise BadStartPositionsError(f"bad orientation in {entry!r}")
        if not (0 <= x < width and 0 <= y < height) or tiles[y][x] != FLOOR:
            raise BadStartPositionsError(f"start {x},{y} is not a floor cell")
        positions.append((x, y))
        orientations.append(LETTER_ORIENTATIONS[parts[2]])
    if positions[0] == positions[1]:
        raise BadStartPositionsError("start positions must be distinct")

    return Layout(
        name=name,
        width=width,
        height=height,
        tiles=tiles,
        start_positions=(positions[0], positions[1]),
        start_orientations=(orientations[0], orientations[1]),
    )


def load_layout(name: str) -> Layout:
    """Load one of the packaged layouts by name."""
    path = resources.files(__package__).joinpath("layouts", f"{name}.layout")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no packaged layout named {name!r}") from None
    return parse_layout(text)
