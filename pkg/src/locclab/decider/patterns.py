"""Exact combinatorial search for first-party measurements on product sets.

For product states |a_k>|b_k>, a measurement direction |v> on the first party
preserves orthogonality of a pair (h, k) with <b_h|b_k> != 0 only if
<v|a_h> = 0 or <v|a_k> = 0. So the states orthogonal to |v> form a hitting set
(vertex cover) of the conflict pairs, and |v> lies in W(S), the orthogonal
complement of span{a_s : s in S}, for some minimal cover S. The union of the
W(S) is therefore the set of all admissible rank-one directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.optimize import nnls

from ..conflict import build_conflict_graph
from ..numerics import TOL, gram_schmidt, hermitian_to_coords, matrix_rank, nullspace, orthocomplement
from ..states import MeasurementBasis, ProductState, Side, StateSet
from .verdict import Scope, SidePolicy, Status, Verdict, cvec_json
from .verify import verify_pure_basis


@dataclass
class PatternLimits:
    max_covers: int = 100_000
    max_greedy_starts: int = 256


@dataclass
class CoverCertificate:
    side: Side
    conflict_pairs: list[tuple[int, int]]
    covers: list[tuple[tuple[int, ...], int]]  # (S, dim W(S))
    directions: list[np.ndarray] = field(default_factory=list)
    largest_orthogonal_family: int = 0
    union_span: int = 0
    povm_feasible: bool | None = None
    povm_weights: list[float] = field(default_factory=list)
    povm_residual: float | None = None

    @property
    def union_empty(self) -> bool:
        return all(dim == 0 for _, dim in self.covers)

    def to_json(self) -> dict:
        return {
            "kind": "cover",
            "side": self.side.value,
            "conflict_pairs": [list(p) for p in self.conflict_pairs],
            "covers": [{"states": list(s), "dim_W": d} for s, d in self.covers],
            "directions": [cvec_json(v) for v in self.directions],
            "largest_orthogonal_family": self.largest_orthogonal_family,
            "union_span": self.union_span,
            "povm_feasible": self.povm_feasible,
            "povm_weights": list(self.povm_weights),
            "povm_residual": self.povm_residual,
        }


def minimal_vertex_covers(n: int, edges, limit: int | None = None) -> list[tuple[int, ...]] | None:
    """All minimal vertex covers, as complements of maximal independent sets.

    Returns None when more than ``limit`` covers exist.
    """
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    covers = []
    for clique in nx.find_cliques(nx.complement(g)):
        covers.append(tuple(sorted(set(range(n)) - set(clique))))
        if limit is not None and len(covers) > limit:
            return None
    return sorted(set(covers), key=lambda s: (len(s), s))


def _dedupe_directions(vectors, tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        if all(abs(abs(np.vdot(u, v)) - 1) > tol for u in out):
            out.append(v)
    return out


def _orthogonal_family(directions, dim: int, tol: float) -> list[int]:
    """Largest set of mutually orthogonal directions (indices), stopping at ``dim``."""
    g = nx.Graph()
    g.add_nodes_from(range(len(directions)))
    for i, j in itertools.combinations(range(len(directions)), 2):
        if abs(np.vdot(directions[i], directions[j])) < tol:
            g.add_edge(i, j)
    best: list[int] = []
    for clique in nx.find_cliques(g):
        if len(clique) > len(best):
            best = sorted(clique)
            if len(best) >= dim:
                return best[:dim]
    return best


def _povm_from_directions(directions, dim: int):
    """Non-negative weights c with sum_i c_i |v_i><v_i| = I, if they exist."""
    a = np.column_stack([hermitian_to_coords(np.outer(v, v.conj())) for v in directions])
    target = hermitian_to_coords(np.eye(dim))
    weights, resid = nnls(a, target)
    return weights, float(resid)


def _intersect(w_basis: list[np.ndarray], chosen: list[np.ndarray], tol: float) -> list[np.ndarray]:
    """Orthonormal basis of span(w_basis) intersected with the complement of ``chosen``."""
    w = np.column_stack(w_basis)
    if not chosen:
        return gram_schmidt(list(w.T), tol)
    c = np.column_stack(chosen)
    ys = nullspace(c.conj().T @ w, tol)
    if not ys:
        return []
    return gram_schmidt([w @ y for y in ys], tol)


def _greedy_fill(subspaces, dim: int, tol: float, max_starts: int) -> list[np.ndarray] | None:
    order = sorted(range(len(subspaces)), key=lambda i: -len(subspaces[i]))
    for start in order[:max_starts]:
        chosen: list[np.ndarray] = []
        for i in [start] + [i for i in order if i != start]:
            chosen.extend(_intersect(subspaces[i], chosen, tol))
            if len(chosen) >= dim:
                return chosen[:dim]
    return None


def pattern_search(
    states: StateSet, side: Side, limits: PatternLimits | None = None, tol: float = TOL
) -> Verdict:
    side = Side(side)
    limits = limits or PatternLimits()
    policy = SidePolicy.parse(side)
    for i, s in enumerate(states.states):
        if not isinstance(s, ProductState):
            raise TypeError(f"state {i} ({states.labels[i]}) is not a product state")
    oriented = states.oriented(side)
    d = oriented.d_a
    a_parts = [s.a for s in oriented.states]
    graph = build_conflict_graph(oriented, Side.ALICE, tol)
    warnings = [f"near-threshold overlap in pair {p}" for p in graph.near_threshold]

    covers = minimal_vertex_covers(len(oriented), graph.conflict_pairs, limits.max_covers)
    if covers is None:
        return Verdict(
            Status.UNDETERMINED, policy, "pattern",
            reason=f"more than {limits.max_covers} minimal hitting sets", warnings=warnings,
        )

    subspaces, table = [], []
    for cover in covers:
        w = orthocomplement([a_parts[s] for s in cover], d, tol)
        table.append((cover, len(w)))
        if w:
            subspaces.append(w)
    cert = CoverCertificate(side, list(graph.conflict_pairs), table)
    all_vectors = [v for w in subspaces for v in w]
    cert.union_span = matrix_rank(all_vectors, tol) if all_vectors else 0
    one_dim = all(len(w) == 1 for w in subspaces)

    def distinguishable(vectors, how: str) -> Verdict | None:
        basis = MeasurementBasis(side, gram_schmidt(vectors, tol))
        ok, _ = verify_pure_basis(states, basis, tol)
        if not ok:
            return None
        return Verdict(Status.DISTINGUISHABLE, policy, "pattern", certificate=cert, basis=basis,
                       reason=how, warnings=warnings)

    if one_dim:
        cert.directions = _dedupe_directions([w[0] for w in subspaces], tol)
        family = _orthogonal_family(cert.directions, d, tol)
        cert.largest_orthogonal_family = len(family)
        if len(family) >= d:
            found = distinguishable([cert.directions[i] for i in family], "orthogonal candidate family")
            if found is not None:
                return found
    else:
        filled = _greedy_fill(subspaces, d, tol, limits.max_greedy_starts)
        if filled is not None:
            found = distinguishable(filled, "greedy fill of admissible subspaces")
            if found is not None:
                return found

    if cert.union_span < d:
        reason = (
            "no admissible direction exists" if cert.union_span == 0
            else f"admissible directions span only {cert.union_span} of {d} dimensions"
        )
        return Verdict(Status.INDISTINGUISHABLE, policy, "pattern", certificate=cert,
                       scope=Scope.POVM, reason=reason, warnings=warnings)
    if one_dim:
        weights, resid = _povm_from_directions(cert.directions, d)
        cert.povm_residual = resid
        cert.povm_feasible = resid < 1e-7
        if cert.povm_feasible:
            cert.povm_weights = [float(w) for w in weights]
            return Verdict(
                Status.INDISTINGUISHABLE, policy, "pattern", certificate=cert, scope=Scope.PROJECTIVE,
                reason="no orthonormal basis of admissible directions; a non-projective rank-one "
                       "POVM built from them does exist (see povm_weights)",
                warnings=warnings,
            )
        return Verdict(
            Status.INDISTINGUISHABLE, policy, "pattern", certificate=cert, scope=Scope.POVM,
            reason="admissible directions cannot resolve the identity", warnings=warnings,
        )
    return Verdict(Status.UNDETERMINED, policy, "pattern", certificate=cert,
                   reason="admissible subspaces of dimension >= 2 and no basis found",
                   warnings=warnings)
