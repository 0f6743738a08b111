"""Per-party orthogonality structure of product-state sets.

For a measuring party, ``ortho_edges`` are the pairs whose factors on that
party are orthogonal, and ``conflict_pairs`` the pairs whose factors on the
*other* party overlap: those are the pairs the measuring party has to separate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .numerics import TOL
from .states import ProductState, Side, StateSet


@dataclass
class ConflictGraph:
    n: int
    side: Side
    ortho_edges: list[tuple[int, int]]
    conflict_pairs: list[tuple[int, int]]
    near_threshold: list[tuple[int, int]] = field(default_factory=list)

    def is_ortho(self, h: int, k: int) -> bool:
        return (min(h, k), max(h, k)) in self._ortho

    def __post_init__(self):
        self._ortho = set(self.ortho_edges)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "side": self.side.value,
            "ortho_edges": [list(e) for e in self.ortho_edges],
            "conflict_pairs": [list(e) for e in self.conflict_pairs],
            "near_threshold": [list(e) for e in self.near_threshold],
        }


def _factors(states: StateSet, side: Side) -> tuple[list, list]:
    for i, s in enumerate(states.states):
        if not isinstance(s, ProductState):
            raise TypeError(f"state {i} ({states.labels[i]}) is not a product state")
    if Side(side) is Side.ALICE:
        return [s.a for s in states.states], [s.b for s in states.states]
    return [s.b for s in states.states], [s.a for s in states.states]


def build_conflict_graph(states: StateSet, side: Side, tol: float = TOL) -> ConflictGraph:
    side = Side(side)
    mine, other = _factors(states, side)
    ortho, conflicts, near = [], [], []
    for h, k in itertools.combinations(range(len(states)), 2):
        ov_mine = abs(np.vdot(mine[h], mine[k]))
        ov_other = abs(np.vdot(other[h], other[k]))
        if ov_mine < tol:
            ortho.append((h, k))
        if ov_other >= tol:
            conflicts.append((h, k))
        if any(tol * 1e-3 < x < tol * 1e3 for x in (ov_mine, ov_other)):
            near.append((h, k))
    return ConflictGraph(len(states), side, ortho, conflicts, near)


class QuadClass(NamedTuple):
    label: str  # A_full, A_triangle, B_triangle, cycle_g, path_h
    side: Side  # party that measures first in the matching construction
    order: tuple[int, ...]  # order[c] = state index playing canonical role c


# canonical ortho patterns on the measuring party, with the pairs the other
# party must then make orthogonal
_CYCLE_G = ({(0, 1), (0, 2), (1, 3), (2, 3)}, {(0, 3), (1, 2)})
_PATH_H = ({(0, 2), (0, 3), (1, 2)}, {(0, 1), (1, 3), (2, 3)})


def _find_pattern(mine: ConflictGraph, other: ConflictGraph, pattern) -> tuple[int, ...] | None:
    need_mine, need_other = pattern
    for perm in itertools.permutations(range(4)):
        if all(mine.is_ortho(perm[i], perm[j]) for i, j in need_mine) and all(
            other.is_ortho(perm[i], perm[j]) for i, j in need_other
        ):
            return perm
    return None


def _triangle(g: ConflictGraph) -> tuple[int, ...] | None:
    for tri in itertools.combinations(range(4), 3):
        if all(g.is_ortho(i, j) for i, j in itertools.combinations(tri, 2)):
            rest = tuple(i for i in range(4) if i not in tri)
            return tri + rest
    return None


def classify_quad(g_a: ConflictGraph, g_b: ConflictGraph) -> QuadClass:
    """Which constructive branch applies to four orthogonal product states.

    Branches are tried in the order A_full, A_triangle, B_triangle, cycle_g,
    path_h; the cycle and path patterns are looked for on Alice's party first
    and then mirrored onto Bob's.
    """
    if g_a.n != 4 or g_b.n != 4:
        raise ValueError(f"classify_quad needs exactly four states, got {g_a.n}")
    if all(g_a.is_ortho(i, j) for i, j in itertools.combinations(range(4), 2)):
        return QuadClass("A_full", Side.ALICE, (0, 1, 2, 3))
    tri = _triangle(g_a)
    if tri is not None:
        return QuadClass("A_triangle", Side.ALICE, tri)
    tri = _triangle(g_b)
    if tri is not None:
        return QuadClass("B_triangle", Side.BOB, tri)
    for label, pattern in (("cycle_g", _CYCLE_G), ("path_h", _PATH_H)):
        for mine, other in ((g_a, g_b), (g_b, g_a)):
            perm = _find_pattern(mine, other, pattern)
            if perm is not None:
                return QuadClass(label, mine.side, perm)
    raise ValueError("orthogonality structure matches no branch; is the set globally orthogonal?")
