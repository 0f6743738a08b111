from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import DEFAULT_RESTARTS, TOL, UnitaryParams, minimize, unitary_from_params
from ..states import MeasurementBasis, Side, StateSet
from .verdict import SidePolicy, Status, Verdict
from .verify import coefficient_stack, residual_objective, verify_pure_basis

OBJECTIVE_TOL = 1e-10


@dataclass
class OptimizerEvidence:
    side: Side
    best_value: float
    restarts: int
    seed: int
    params: UnitaryParams

    def to_json(self) -> dict:
        return {
            "kind": "optimizer",
            "side": self.side.value,
            "best_residual": self.best_value,
            "restarts": self.restarts,
            "seed": self.seed,
            "params": list(self.params.values),
        }


def optimizer_search(
    states: StateSet,
    side: Side,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 42,
    tol: float = TOL,
    objective_tol: float = OBJECTIVE_TOL,
) -> Verdict:
    """Minimize the summed squared residual overlaps over the party's unitary group.

    A value below ``objective_tol`` is only accepted after the basis passes
    ``verify_pure_basis`` at ``tol``. Never concludes Indistinguishable.
    """
    side = Side(side)
    policy = SidePolicy.parse(side)
    coeffs = coefficient_stack(states, side)
    d = coeffs.shape[1]

    def objective(p: UnitaryParams) -> float:
        return residual_objective(coeffs, unitary_from_params(p))

    params, value = minimize(objective, d, restarts=restarts, seed=seed, target=objective_tol)
    evidence = OptimizerEvidence(side, value, restarts, seed, params)
    if value < objective_tol:
        u = unitary_from_params(params)
        basis = MeasurementBasis(side, list(u.T))
        ok, table = verify_pure_basis(states, basis, tol)
        if ok:
            return Verdict(Status.DISTINGUISHABLE, policy, "optimizer", certificate=evidence,
                           basis=basis)
        return Verdict(
            Status.UNDETERMINED, policy, "optimizer", certificate=evidence,
            reason=f"objective {value:.3g} below threshold but re-verification failed "
                   f"(max residual overlap {table.max_offdiag:.3g})",
        )
    return Verdict(Status.UNDETERMINED, policy, "optimizer", certificate=evidence,
                   reason=f"best residual {value:.6g} over {restarts} restarts")
