"""ASCII drawing of product sets whose factors live on computational intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import TOL
from .states import ProductState, StateSet

UNKNOWN = "?"


@dataclass
class Tile:
    tag: str
    cols: tuple[int, int]  # inclusive Alice index range
    rows: tuple[int, int]  # inclusive Bob index range
    members: list[int]


def _interval(v: np.ndarray, tol: float) -> tuple[int, int] | None:
    support = np.flatnonzero(np.abs(v) > tol)
    if support.size == 0 or support[-1] - support[0] + 1 != support.size:
        return None
    return int(support[0]), int(support[-1])


def _family(label: str) -> str:
    head = label.split(":", 1)[0]
    return head.rstrip("+-") or head


def tiles_of(states: StateSet, tol: float = TOL) -> tuple[list[Tile], list[int]]:
    """Group members into tiles by (Alice interval, Bob interval).

    Returns the tiles and the indices that could not be placed (entangled
    members or factors with non-contiguous support).
    """
    by_span: dict[tuple, Tile] = {}
    unplaced: list[int] = []
    for i, s in enumerate(states.states):
        cols = _interval(s.a, tol) if isinstance(s, ProductState) else None
        rows = _interval(s.b, tol) if isinstance(s, ProductState) else None
        if cols is None or rows is None:
            unplaced.append(i)
            continue
        key = (cols, rows)
        if key not in by_span:
            by_span[key] = Tile(_family(states.labels[i]), cols, rows, [])
        by_span[key].members.append(i)
    return list(by_span.values()), unplaced


def render_grid(states: StateSet, tol: float = TOL) -> tuple[str, list[str]]:
    """Grid of d_A columns by d_B rows; each cell shows the tile covering it.

    Tiles get single-letter glyphs in order of first appearance; cells covered
    by more than one tile show ``*``. Returns the drawing and any warnings.
    """
    tiles, unplaced = tiles_of(states, tol)
    glyphs = [chr(ord("A") + i) if i < 26 else chr(ord("a") + i - 26) for i in range(len(tiles))]
    grid = [["." for _ in range(states.d_a)] for _ in range(states.d_b)]
    for glyph, t in zip(glyphs, tiles):
        for r in range(t.rows[0], t.rows[1] + 1):
            for c in range(t.cols[0], t.cols[1] + 1):
                grid[r][c] = glyph if grid[r][c] == "." else "*"

    width = max(2, len(str(max(states.d_a, states.d_b) - 1)))
    header = " " * (width + 2) + " ".join(f"{c:>{width}}" for c in range(states.d_a))
    lines = [header]
    for r in range(states.d_b):
        cells = " ".join(f"{g:>{width}}" for g in grid[r])
        lines.append(f"{r:>{width}}  {cells}")
    lines.append("")
    for glyph, t in zip(glyphs, tiles):
        members = ", ".join(states.labels[i] for i in t.members)
        lines.append(
            f"{glyph}: {t.tag:<4} A[{t.cols[0]}..{t.cols[1]}] x B[{t.rows[0]}..{t.rows[1]}]  {members}"
        )
    warnings = []
    for i in unplaced:
        lines.append(f"{UNKNOWN}: {states.labels[i]}")
        warnings.append(f"{states.labels[i]} has no tile (entangled or non-interval support)")
    return "\n".join(lines), warnings
