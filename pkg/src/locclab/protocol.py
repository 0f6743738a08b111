"""Executable one-way protocols: synthesis, construction from a basis, simulation.

A protocol is: the first party measures ``first_basis``; on outcome j the other
party measures ``followup[j]``; the pair of outcomes (j, i) is mapped to a
state label by ``decision`` (or to ``IMPOSSIBLE`` if no state reaches it).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .conflict import build_conflict_graph, classify_quad
from .decider.operator_space import require_orthogonal
from .decider.verdict import basis_json
from .decider.verify import verify_pure_basis
from .numerics import TOL, complete_basis
from .states import MeasurementBasis, ProductState, Side, StateSet, residual_rows

IMPOSSIBLE = "impossible"


@dataclass
class Protocol:
    first: Side
    first_basis: MeasurementBasis
    followup: dict[int, MeasurementBasis]
    decision: dict[tuple[int, int], str]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "first": self.first.value,
            "first_basis": basis_json(self.first_basis),
            "followup": {str(j): basis_json(b) for j, b in sorted(self.followup.items())},
            "decision": [
                {"outcome": [j, i], "label": lab} for (j, i), lab in sorted(self.decision.items())
            ],
            "notes": list(self.notes),
        }


@dataclass
class SimulationReport:
    labels: list[str]
    success: np.ndarray  # per state
    confusion: np.ndarray  # rows: states; columns: labels + IMPOSSIBLE

    @property
    def min_success(self) -> float:
        return float(np.min(self.success)) if self.success.size else 1.0

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "success": [float(x) for x in self.success],
            "min_success": self.min_success,
        }


def protocol_from_basis(states: StateSet, basis: MeasurementBasis, tol: float = TOL) -> Protocol:
    """Turn a verified first-party basis into a complete protocol.

    For outcome j the follow-up basis is the normalized nonzero residuals
    eta_j^k (mutually orthogonal by verification), padded to completeness.
    """
    ok, table = verify_pure_basis(states, basis, tol)
    if not ok:
        raise ValueError(
            f"basis fails verification (max residual overlap {table.max_offdiag:.3g} "
            f"at outcome/pair {table.worst()})"
        )
    other = basis.side.other
    d_other = states.dim(other)
    rows = [residual_rows(s, basis) for s in states.states]
    followup, decision = {}, {}
    for j in range(basis.dim):
        present = [k for k in range(len(states)) if np.linalg.norm(rows[k][j]) > tol]
        fb = complete_basis([rows[k][j] for k in present], d_other, tol)
        followup[j] = MeasurementBasis(other, fb)
        for i, f in enumerate(fb):
            claim = [k for k in present if abs(np.vdot(f, rows[k][j])) > tol]
            if len(claim) > 1:
                raise AssertionError(f"outcome ({j}, {i}) claimed by states {claim}")
            decision[(j, i)] = states.labels[claim[0]] if claim else IMPOSSIBLE
    return Protocol(basis.side, basis, followup, decision)


def simulate(protocol: Protocol, states: StateSet) -> SimulationReport:
    """Exact outcome probabilities for every member; no sampling."""
    if protocol.first_basis.dim != states.dim(protocol.first):
        raise ValueError("protocol and state set dimensions differ")
    columns = list(states.labels) + [IMPOSSIBLE]
    col = {lab: i for i, lab in enumerate(columns)}
    confusion = np.zeros((len(states), len(columns)))
    for k, s in enumerate(states.states):
        rows = residual_rows(s, protocol.first_basis)
        for j, fb in protocol.followup.items():
            if fb.dim != rows.shape[1]:
                raise ValueError("follow-up basis dimension mismatch")
            amps = fb.matrix.conj().T @ rows[j]
            for i, a in enumerate(amps):
                confusion[k, col[protocol.decision[(j, i)]]] += abs(a) ** 2
    success = np.array([confusion[k, col[lab]] for k, lab in enumerate(states.labels)])
    return SimulationReport(list(states.labels), success, confusion)


def _require_products(states: StateSet, n: int | None = None) -> None:
    if n is not None and len(states) != n:
        raise ValueError(f"expected {n} states, got {len(states)}")
    for i, s in enumerate(states.states):
        if not isinstance(s, ProductState):
            raise TypeError(f"state {i} is not a product state")


def _ortho(u, v, tol=TOL) -> bool:
    return abs(np.vdot(u, v)) < tol


def synth_three(states: StateSet, tol: float = TOL) -> Protocol:
    """Alice-first protocol for up to three orthogonal product states.

    If the Alice factors are mutually orthogonal they are the basis. Otherwise
    a non-orthogonal pair is relabeled (1, 2), the remaining state is 0, and
    the basis is Gram-Schmidt of (a_0, a_1, a_2) when <a_0|a_1> = 0 (cases 1
    and 2), of (a_0, a_2, a_1) when only <a_0|a_2> = 0 (case 3), and the
    computational basis when neither vanishes (case 4, Bob factors all
    orthogonal). The basis is padded with computational vectors.
    """
    if len(states) > 3:
        raise ValueError("synth_three handles at most three states")
    _require_products(states)
    require_orthogonal(states, tol)
    a = [s.a for s in states.states]
    d = states.d_a
    n = len(a)
    pairs = [(h, k) for h, k in itertools.combinations(range(n), 2) if not _ortho(a[h], a[k], tol)]
    if not pairs:
        order, case = list(range(n)), "alice factors mutually orthogonal"
    elif n == 2:
        order, case = [], "bob factors orthogonal"
    else:
        p1, p2 = pairs[0]
        p0 = next(i for i in range(3) if i not in (p1, p2))
        if _ortho(a[p0], a[p1], tol):
            order, case = [p0, p1, p2], "case 1/2: {a0, a1, a2'}"
        elif _ortho(a[p0], a[p2], tol):
            order, case = [p0, p2, p1], "case 3: {a0, a1', a2}"
        else:
            order, case = [], "case 4: bob factors mutually orthogonal"
    vectors = complete_basis([a[i] for i in order], d, tol)
    proto = protocol_from_basis(states, MeasurementBasis(Side.ALICE, vectors), tol)
    proto.notes.append(case)
    return proto


def synth_four(states: StateSet, tol: float = TOL) -> Protocol:
    """Protocol for four orthogonal product states, choosing who goes first.

    The orthogonality structure is classified; each branch fixes a
    Gram-Schmidt order on the measuring party's factors:
    full/triangle: the orthogonal factors first; cycle_g: (a0, a1, a2, a3),
    giving a2 - alpha a1 and a3 - beta a0; path_h: (a0, a2, a1, a3), giving
    a1 - alpha a0 and a3 - beta a1' - gamma a2.
    """
    _require_products(states, 4)
    require_orthogonal(states, tol)
    g_a = build_conflict_graph(states, Side.ALICE, tol)
    g_b = build_conflict_graph(states, Side.BOB, tol)
    qc = classify_quad(g_a, g_b)
    o = qc.order
    if qc.label == "path_h":
        seq = [o[0], o[2], o[1], o[3]]
    else:
        seq = list(o)
    factors = [s.a if qc.side is Side.ALICE else s.b for s in states.states]
    vectors = complete_basis([factors[i] for i in seq], states.dim(qc.side), tol)
    proto = protocol_from_basis(states, MeasurementBasis(qc.side, vectors), tol)
    proto.notes.append(f"branch {qc.label} ({qc.side.value} first), roles {list(o)}")
    if qc.label == "cycle_g":
        proto.notes.append(
            "cycle_g: anchors follow the orthogonality conditions, a2 - alpha a1 and "
            "a3 - beta a0, with alpha = <a1|a2> and beta = <a0|a3>"
        )
    return proto
