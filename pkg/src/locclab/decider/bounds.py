"""Counting bound on product members of a one-way distinguishable set.

If Alice measures first in a basis, each outcome j leaves at most d_B mutually
orthogonal nonzero residuals, so at most d_A d_B (outcome, residual) pairs
occur overall. Product states use at least one pair and entangled states at
least two, which gives x + 2 (N - x) <= d_A d_B for x product members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import TOL
from ..states import MixedState, ProductState, StateSet


def min_product_bound(d_a: int, d_b: int, n: int) -> int:
    """Least number of product members an N-state one-way distinguishable set needs."""
    half = (d_a * d_b) // 2
    k = n - half
    if k <= 0:
        return 0
    return max(0, 2 * k + 2 * half - d_a * d_b)


def is_product(state, tol: float = TOL) -> bool:
    if isinstance(state, ProductState):
        return True
    if isinstance(state, MixedState):
        return False
    sv = np.linalg.svd(state.coeff(), compute_uv=False)
    return sv.size < 2 or sv[1] < tol * sv[0]


@dataclass
class BoundReport:
    n: int
    d_a: int
    d_b: int
    product_count: int
    required: int
    mixed_members: int = 0

    @property
    def violated(self) -> bool:
        return self.product_count < self.required

    def to_json(self) -> dict:
        return {
            "kind": "product_count_bound",
            "n": self.n,
            "dA": self.d_a,
            "dB": self.d_b,
            "product_count": self.product_count,
            "required": self.required,
            "mixed_members": self.mixed_members,
            "violated": self.violated,
        }


def bound_check(states: StateSet, tol: float = TOL) -> BoundReport:
    """Count Schmidt-rank-one members and compare with ``min_product_bound``.

    A violation rules out every first-measurement basis, for either party.
    Mixed members are never counted as product.
    """
    count = sum(is_product(s, tol) for s in states.states)
    mixed = sum(isinstance(s, MixedState) for s in states.states)
    return BoundReport(
        n=len(states),
        d_a=states.d_a,
        d_b=states.d_b,
        product_count=count,
        required=min_product_bound(states.d_a, states.d_b, len(states)),
        mixed_members=mixed,
    )
