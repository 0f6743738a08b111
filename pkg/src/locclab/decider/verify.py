"""Checks of a given first-party measurement against a state set."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from ..numerics import TOL
from ..states import MeasurementBasis, MixedState, Side, StateSet
from .verdict import ResidualTable


def coefficient_stack(states: StateSet, side: Side) -> np.ndarray:
    """Coefficient matrices of all members, measuring party first: shape (N, d_side, d_other)."""
    if states.has_mixed:
        raise TypeError("mixed states present; use verify_mixed_basis")
    c = np.array([s.coeff() for s in states.states])
    return c if Side(side) is Side.ALICE else c.transpose(0, 2, 1)


def residual_gram(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """G[j, h, k] = <eta_j^h|eta_j^k> for the basis given by the columns of ``u``."""
    rows = np.einsum("ij,nim->njm", u.conj(), coeffs)  # rows[n, j] = eta_j^n
    return np.einsum("hjm,kjm->jhk", rows.conj(), rows)


def residual_objective(coeffs: np.ndarray, u: np.ndarray) -> float:
    """sum_j sum_{h<k} |<eta_j^h|eta_j^k>|^2."""
    g = residual_gram(coeffs, u)
    n = g.shape[1]
    iu = np.triu_indices(n, 1)
    return float(np.sum(np.abs(g[:, iu[0], iu[1]]) ** 2))


def verify_pure_basis(
    states: StateSet, basis: MeasurementBasis, tol: float = TOL
) -> tuple[bool, ResidualTable]:
    """Does measuring ``basis`` first leave mutually orthogonal residuals?

    True iff |<eta_j^h|eta_j^k>| < tol for every outcome j and pair h != k.
    """
    if states.has_mixed:
        raise TypeError("mixed states present; use verify_mixed_basis")
    if basis.dim != states.dim(basis.side):
        raise ValueError(
            f"basis dimension {basis.dim} does not match {basis.side.value}'s dimension "
            f"{states.dim(basis.side)}"
        )
    table = ResidualTable(residual_gram(coefficient_stack(states, basis.side), basis.matrix))
    return table.max_offdiag < tol, table


class MixedCheck(NamedTuple):
    ok: bool
    worst: tuple[int, int, int] | None  # (m, h, k)
    max_overlap: float


def diagonal_block(rho: np.ndarray, u: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """(<u| x I) rho (|u> x I)."""
    r = rho.reshape(d_a, d_b, d_a, d_b)
    return np.einsum("i,iajb,j->ab", u.conj(), r, u)


def verify_mixed_basis(states: StateSet, basis: MeasurementBasis, tol: float = TOL) -> MixedCheck:
    """Block condition tr(rho^h_mm rho^k_mm) = 0 for every basis index m and h != k.

    A Bob-side basis is handled by exchanging the parties first.
    """
    for i, s in enumerate(states.states):
        if not isinstance(s, MixedState):
            raise TypeError(f"state {i} is not a density matrix; embed pure states first")
    oriented = states.oriented(basis.side)
    if basis.dim != oriented.d_a:
        raise ValueError("basis dimension does not match the measuring party")
    worst, where = 0.0, None
    n = len(oriented)
    for m, u in enumerate(basis.vectors):
        blocks = [diagonal_block(s.rho, u, oriented.d_a, oriented.d_b) for s in oriented.states]
        for h in range(n):
            for k in range(h + 1, n):
                ov = abs(np.trace(blocks[h] @ blocks[k]))
                if where is None or ov > worst:
                    worst, where = float(ov), (m, h, k)
    return MixedCheck(worst < tol, where, worst)


def _check_povm(povm: Sequence, dim: int, tol: float) -> list[np.ndarray]:
    elems = [np.asarray(e, dtype=complex) for e in povm]
    if not elems:
        raise ValueError("empty POVM")
    total = np.zeros((dim, dim), dtype=complex)
    for e in elems:
        if e.shape != (dim, dim):
            raise ValueError(f"POVM element of shape {e.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(e - e.conj().T)) > tol or np.min(np.linalg.eigvalsh(e)) < -tol:
            raise ValueError("POVM element is not positive semidefinite")
        total += e
    if np.max(np.abs(total - np.eye(dim))) > tol:
        raise ValueError("POVM elements do not sum to the identity")
    return elems


def pair_measurement_check(psi, phi, povm: Sequence, tol: float = TOL) -> bool:
    """Does the measurement {E_k} keep |psi> and |phi> orthogonal: <psi|E_k|phi> = 0 for all k?"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    elems = _check_povm(povm, psi.shape[0], tol)
    return all(abs(np.vdot(psi, e @ phi)) < tol for e in elems)


def projectors(basis: MeasurementBasis) -> list[np.ndarray]:
    return [np.outer(v, v.conj()) for v in basis.vectors]


def c3_pair_rank1(basis: MeasurementBasis, psi, phi, tol: float = TOL) -> bool:
    """Membership form of the C^3 pair condition.

    Two orthogonal states of C^3 are separated by a rank-one projective
    measurement iff one of them is (up to phase) a basis vector. The result is
    cross-checked against ``pair_measurement_check`` on the same projectors.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if psi.shape[0] != 3 or basis.dim != 3:
        raise ValueError("c3_pair_rank1 is defined on C^3")
    psi = psi / np.linalg.norm(psi)
    phi = phi / np.linalg.norm(phi)
    if abs(np.vdot(psi, phi)) >= tol:
        raise ValueError("psi and phi are not orthogonal")
    member = any(
        abs(np.vdot(v, x)) > 1 - tol for v in basis.vectors for x in (psi, phi)
    )
    direct = pair_measurement_check(psi, phi, projectors(basis), tol)
    if member != direct:
        raise AssertionError(
            f"membership test ({member}) disagrees with cross-term test ({direct})"
        )
    return member
