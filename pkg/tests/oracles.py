"""Reference computations that avoid the package's own linear-algebra paths.

Everything here works on full kets in C^(d_A d_B) with explicit Kronecker
products, so it shares no code with the coefficient-matrix routines under test.
"""

from __future__ import annotations

import itertools

import numpy as np

from locclab.numerics import orthocomplement
from locclab.states import ProductState, StateSet


def hermitian_basis(d: int) -> list[np.ndarray]:
    """E_ii, E_ij + E_ji, i(E_ij - E_ji): a real basis of d x d Hermitian matrices."""
    out = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1
        out.append(m)
    for i, j in itertools.combinations(range(d), 2):
        m = np.zeros((d, d), dtype=complex)
        m[i, j] = m[j, i] = 1
        out.append(m)
        m = np.zeros((d, d), dtype=complex)
        m[i, j], m[j, i] = 1j, -1j
        out.append(m)
    return out


def preserving_dimension(states: StateSet, side: str) -> int:
    """Real dimension of {E Hermitian : <psi_h|(E x I)|psi_k> = 0 for all h < k}."""
    kets = [s.ket() for s in states.states]
    d = states.d_a if side == "alice" else states.d_b
    lift = (lambda e: np.kron(e, np.eye(states.d_b))) if side == "alice" else (
        lambda e: np.kron(np.eye(states.d_a), e))
    cols = []
    for e in hermitian_basis(d):
        big = lift(e)
        vals = [np.vdot(kets[h], big @ kets[k]) for h, k in itertools.combinations(range(len(kets)), 2)]
        cols.append(np.concatenate([np.real(vals), np.imag(vals)]))
    a = np.array(cols).T
    if a.size == 0:
        return d * d
    return d * d - int(np.linalg.matrix_rank(a, tol=1e-9))


def success_by_kron(states: StateSet, first_side: str, first_vectors, followup, decision) -> np.ndarray:
    """Identification probability per state from full projectors |j>|i>."""
    out = np.zeros(len(states))
    for k, s in enumerate(states.states):
        ket = s.ket()
        for j, u in enumerate(first_vectors):
            for i, w in enumerate(followup[j]):
                vec = np.kron(u, w) if first_side == "alice" else np.kron(w, u)
                if decision[(j, i)] == states.labels[k]:
                    out[k] += abs(np.vdot(vec, ket)) ** 2
    return out


def cover_ranks(states: StateSet, side: str, covers) -> list[int]:
    parts = [s.a if side == "alice" else s.b for s in states.states]
    return [int(np.linalg.matrix_rank(np.array([parts[i] for i in c]), tol=1e-9)) for c in covers]


def bell3_grid_floor(n: int = 181) -> float:
    """min over a theta, delta grid of the summed residual overlaps for bell3, Alice first."""
    s2 = 1 / np.sqrt(2)
    kets = [s2 * np.array([1, 0, 0, 1]), s2 * np.array([1, 0, 0, -1]), s2 * np.array([0, 1, 1, 0])]
    best = np.inf
    for th in np.linspace(0, 2 * np.pi, n):
        for de in np.linspace(0, 2 * np.pi, n):
            phi = np.array([np.cos(th), np.exp(1j * de) * np.sin(th)])
            perp = np.array([-np.exp(-1j * de) * np.sin(th), np.cos(th)])
            total = 0.0
            for u in (phi, perp):
                # eta_i = (<u| x <i|)|psi>
                etas = [np.array([np.vdot(np.kron(u, e), k) for e in np.eye(2)]) for k in kets]
                for h, k in itertools.combinations(range(3), 2):
                    total += abs(np.vdot(etas[h], etas[k])) ** 2
            best = min(best, total)
    return best


def _rv(d, rng, within=None):
    if within is None:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    else:
        z = sum((rng.standard_normal() + 1j * rng.standard_normal()) * w for w in within)
    return z / np.linalg.norm(z)


def cycle_g_set(rng) -> StateSet:
    """Alice factors orthogonal on the 4-cycle 0-1-3-2-0; Bob on (0,3), (1,2)."""
    a0 = _rv(4, rng)
    w = orthocomplement([a0], 4)
    a1, a2 = _rv(4, rng, w), _rv(4, rng, w)
    a3 = _rv(4, rng, orthocomplement([a1, a2], 4))
    b0, b1 = _rv(2, rng), _rv(2, rng)
    b3, b2 = orthocomplement([b0], 2)[0], orthocomplement([b1], 2)[0]
    return StateSet(4, 2, [ProductState(a, b) for a, b in zip((a0, a1, a2, a3), (b0, b1, b2, b3))])


def path_h_set(rng) -> StateSet:
    """Alice factors orthogonal on (0,2), (0,3), (1,2); Bob on (0,1), (1,3), (2,3)."""
    a0, a1 = _rv(3, rng), _rv(3, rng)
    a2 = orthocomplement([a0, a1], 3)[0]
    a3 = _rv(3, rng, orthocomplement([a0], 3))
    b0, b3 = _rv(3, rng), _rv(3, rng)
    b1 = orthocomplement([b0, b3], 3)[0]
    b2 = _rv(3, rng, orthocomplement([b3], 3))
    return StateSet(3, 3, [ProductState(a, b) for a, b in zip((a0, a1, a2, a3), (b0, b1, b2, b3))])
