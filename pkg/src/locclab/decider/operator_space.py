"""Hermitian operators that keep every pair of states orthogonal.

A POVM element E on the measuring party preserves the orthogonality of
|psi_h> and |psi_k> iff <psi_h|(E x I)|psi_k> = tr(E T_hk) = 0 with
T_hk = Tr_other(|psi_k><psi_h|). If the only Hermitian solutions are multiples
of the identity, no nontrivial first measurement exists on that party.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import TOL, SolutionSpace, hermitian_solution_space
from ..states import Side, StateSet, globally_distinguishable
from .verify import coefficient_stack

IDENTITY_TOL = 1e-9
TRACELESS_TOL = 1e-8


class NotGloballyOrthogonal(ValueError):
    def __init__(self, pair, overlap):
        super().__init__(
            f"states {pair[0]} and {pair[1]} overlap ({overlap:.3g}); the set is not even "
            "globally distinguishable"
        )
        self.pair = pair
        self.overlap = overlap


def require_orthogonal(states: StateSet, tol: float = TOL) -> None:
    check = globally_distinguishable(states, tol)
    if not check.distinguishable:
        raise NotGloballyOrthogonal(check.pair, check.max_overlap)


def preservation_constraints(states: StateSet, side: Side) -> list[np.ndarray]:
    c = coefficient_stack(states, side)
    n = c.shape[0]
    # T_hk = C_k C_h^dagger
    return [c[k] @ c[h].conj().T for h in range(n) for k in range(h + 1, n)]


@dataclass
class OperatorSpaceReport:
    side: Side
    space: SolutionSpace
    n_constraints: int
    identity_residual: float
    traceless_residual: float

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def trivial(self) -> bool:
        return (
            self.dim == 1
            and self.identity_residual < IDENTITY_TOL
            and self.traceless_residual < TRACELESS_TOL
        )

    @property
    def certifies(self) -> bool:
        """Triviality only excludes measurements when the party has dimension >= 2."""
        return self.trivial and self.space.ambient_dim >= 2

    def to_json(self) -> dict:
        return {
            "kind": "operator_space",
            "side": self.side.value,
            "dimension": self.dim,
            "ambient_dim": self.space.ambient_dim,
            "n_constraints": self.n_constraints,
            "trivial": self.trivial,
            "identity_residual": self.identity_residual,
            "traceless_residual": self.traceless_residual,
            "solution_coords": [[float(x) for x in row] for row in self.space.coords],
        }


def op_operator_space(states: StateSet, side: Side, tol: float = TOL) -> OperatorSpaceReport:
    side = Side(side)
    require_orthogonal(states, tol)
    constraints = preservation_constraints(states, side)
    space = hermitian_solution_space(constraints, states.dim(side), tol)
    return OperatorSpaceReport(
        side=side,
        space=space,
        n_constraints=len(constraints),
        identity_residual=space.identity_residual(),
        traceless_residual=space.traceless_residual(),
    )
