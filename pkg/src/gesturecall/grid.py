"""The 3x3 option grid: geometry, hit-testing, selection events."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import DEFAULT_LABELS, ScreenConfig

ROWS = 3
COLS = 3


@dataclass(frozen=True)
class OptionGrid:
    """Nine options tiling the whole canvas, row-major."""

    screen: ScreenConfig = field(default_factory=ScreenConfig)
    labels: tuple[str, ...] = DEFAULT_LABELS

    def __post_init__(self):
        if len(self.labels) != ROWS * COLS or len(set(self.labels)) != len(self.labels):
            raise ValueError("grid requires exactly 9 distinct labels")


@dataclass(frozen=True)
class SelectionEvent:
    cell: int
    label: str
    t_ms: float
    frame_index: int


def hit_test(grid: OptionGrid, cursor: tuple[int, int]) -> int:
    """Cell id under an in-bounds cursor; cells tile the canvas, so always hits."""
    col = int(cursor[0] // (grid.screen.width / COLS))
    row = int(cursor[1] // (grid.screen.height / ROWS))
    return COLS * row + col


def make_selection(
    grid: OptionGrid, cell: int, t_ms: float, frame_index: int
) -> SelectionEvent:
    if not 0 <= cell < ROWS * COLS:
        raise ValueError(f"cell {cell} out of range 0..8")
    return SelectionEvent(cell=cell, label=grid.labels[cell], t_ms=t_ms,
                          frame_index=frame_index)


def cell_center(grid: OptionGrid, cell: int) -> tuple[float, float]:
    """Screen-pixel center of a cell; handy for aiming scripted gestures."""
    if not 0 <= cell < ROWS * COLS:
        raise ValueError(f"cell {cell} out of range 0..8")
    row, col = divmod(cell, COLS)
    return (
        (col + 0.5) * grid.screen.width / COLS,
        (row + 0.5) * grid.screen.height / ROWS,
    )
