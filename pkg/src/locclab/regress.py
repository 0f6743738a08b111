"""Claim-versus-computed table over the reference sets and tilings.

Constructors are looked up as module attributes at call time so a test can
substitute a corrupted one and watch the table fail.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .decider import (
    DecideConfig,
    Status,
    bound_check,
    c3_pair_rank1,
    decide_one_way,
    find_indistinguishable_subset,
    min_product_bound,
    op_operator_space,
    pair_measurement_check,
    pattern_search,
)
from .decider.optimize import optimizer_search
from .decider.verify import projectors
from .numerics import random_unitary
from .protocol import SimulationReport, protocol_from_basis, simulate
from .states import (
    MeasurementBasis,
    Side,
    globally_distinguishable,
    make_named,
    make_tiling,
    random_orthogonal_products,
    tiling_count,
)

SUCCESS_TOL = 1e-9
BELL3_FLOOR = 0.05


@dataclass
class Row:
    criterion: str
    subject: str
    claim: str
    computed: str
    ok: bool

    def format(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        return f"{mark}  [{self.criterion:>3}] {self.subject:<34} claim={self.claim:<28} got={self.computed}"


def _sim_success(verdict) -> float:
    for e in verdict.evidence:
        if isinstance(e, SimulationReport):
            return e.min_success
    return float("nan")


def tiling_rows(config: DecideConfig) -> list[Row]:
    rows = []
    for la, lb in itertools.combinations_with_replacement(range(1, 5), 2):
        n = len(make_tiling(la, lb))
        rows.append(Row("1", f"tiling({la},{lb}) size", str(tiling_count(la, lb)), str(n),
                        n == tiling_count(la, lb)))
    for la, lb in itertools.combinations_with_replacement(range(1, 4), 2):
        ov = globally_distinguishable(make_tiling(la, lb), config.tol).max_overlap
        rows.append(Row("2", f"tiling({la},{lb}) max overlap", "< 1e-10", f"{ov:.2e}", ov < 1e-10))
    for la, lb in ((1, 1), (1, 2)):
        s = make_tiling(la, lb)
        v = decide_one_way(s, "both", config)
        rows.append(Row("3", f"tiling({la},{lb}) both sides", "Indistinguishable",
                        v.status.value, v.status is Status.INDISTINGUISHABLE))
        for side in (Side.ALICE, Side.BOB):
            rep = op_operator_space(s, side, config.tol)
            got = f"dim {rep.dim}, id-resid {rep.identity_residual:.1e}"
            rows.append(Row("3", f"tiling({la},{lb}) {side.value} op-space", "dim 1, id-resid < 1e-8",
                            got, rep.dim == 1 and rep.identity_residual < 1e-8))
    return rows


def named_rows(config: DecideConfig) -> list[Row]:
    rows = []
    bell = make_named("bell3")
    for side in (Side.ALICE, Side.BOB):
        v = decide_one_way(bell, side, config)
        rows.append(Row("4", f"bell3 {side.value} first", "Indistinguishable (operator_space)",
                        f"{v.status.value} ({v.stage})",
                        v.status is Status.INDISTINGUISHABLE and v.stage == "operator_space"))
        opt = optimizer_search(bell, side, config.restarts, config.seed, config.tol)
        best = opt.certificate.best_value
        rows.append(Row("4", f"bell3 {side.value} optimizer floor", f"> {BELL3_FLOOR}",
                        f"{best:.4f}", best > BELL3_FLOOR))

    quad = make_named("quad_3x2")
    va = pattern_search(quad, Side.ALICE, config.limits, config.tol)
    cert = va.certificate
    ok = (va.status is Status.INDISTINGUISHABLE and len(cert.covers) == 4
          and cert.largest_orthogonal_family < quad.d_a)
    rows.append(Row("7", "quad_3x2 alice first", "Indistinguishable, 4 covers",
                    f"{va.status.value}, {len(cert.covers)} covers, scope {va.scope.value}", ok))
    vb = decide_one_way(quad, Side.BOB, config)
    succ = _sim_success(vb)
    rows.append(Row("7", "quad_3x2 bob first", "Distinguishable, success 1",
                    f"{vb.status.value}, success {succ:.12f}",
                    vb.status is Status.DISTINGUISHABLE and succ >= 1 - SUCCESS_TOL))
    vg = decide_one_way(make_named("groisman_2x2"), Side.ALICE, config)
    rows.append(Row("7", "groisman_2x2 alice first", "Indistinguishable", vg.status.value,
                    vg.status is Status.INDISTINGUISHABLE))

    for name, crit in (("penta_3x3", "8"), ("hex_3x2", "9")):
        s = make_named(name)
        for side in (Side.ALICE, Side.BOB):
            v = pattern_search(s, side, config.limits, config.tol)
            cert = v.certificate
            ok = v.status is Status.INDISTINGUISHABLE and cert is not None and (
                cert.union_empty if name == "penta_3x3" else cert.union_span < s.dim(side)
            )
            got = f"{v.status.value}, union span {cert.union_span if cert else '-'}"
            rows.append(Row(crit, f"{name} {side.value} first", "Indistinguishable (covers)", got, ok))
    return rows


def bound_rows() -> list[Row]:
    rows = []
    for args, want in (((2, 2, 3), 2), ((3, 3, 5), 1), ((2, 2, 4), 4)):
        got = min_product_bound(*args)
        rows.append(Row("10", f"min_product_bound{args}", str(want), str(got), got == want))
    rep = bound_check(make_named("bell3"))
    rows.append(Row("10", "bound_check(bell3)", "violated",
                    f"{rep.product_count} < {rep.required}" if rep.violated else "satisfied",
                    rep.violated))
    return rows


def random_rows(config: DecideConfig, n_sets: int = 500) -> list[Row]:
    rows = []
    for size, crit, policy in ((3, "5", "alice"), (4, "6", "both")):
        rng = np.random.default_rng([config.seed, size])
        fails = 0
        for _ in range(n_sets):
            d_a, d_b = (int(x) for x in rng.integers(2, 5, size=2))
            s = random_orthogonal_products(size, d_a, d_b, rng)
            v = decide_one_way(s, policy, config)
            if v.status is not Status.DISTINGUISHABLE or _sim_success(v) < 1 - SUCCESS_TOL:
                fails += 1
        rows.append(Row(crit, f"{n_sets} random {size}-sets ({policy})", "all Distinguishable",
                        f"{n_sets - fails}/{n_sets}", fails == 0))
    return rows


def subset_rows(config: DecideConfig, max_size: int = 6) -> list[Row]:
    rows = []
    s = make_tiling(1, 1)
    for side in (Side.ALICE, Side.BOB):
        r = find_indistinguishable_subset(s, side, max_size, config)
        got = "none" if r.indices is None else f"size {len(r.indices)} {list(r.indices)}"
        rows.append(Row("11", f"tiling(1,1) subset, {side.value} first", f"size <= {max_size}", got,
                        r.indices is not None and len(r.indices) <= max_size))
    return rows


def roundtrip_rows() -> list[Row]:
    quad = make_named("quad_3x2")
    basis = MeasurementBasis.computational(Side.BOB, 2)
    rep = simulate(protocol_from_basis(quad, basis), quad)
    return [Row("12", "quad_3x2 bob basis round trip", "success 1",
                f"{rep.min_success:.12f}", rep.min_success >= 1 - SUCCESS_TOL)]


def c3_rows(seed: int, n: int = 1000) -> list[Row]:
    rng = np.random.default_rng([seed, 8])
    disagree = 0
    for _ in range(n):
        u = random_unitary(3, rng)
        w = random_unitary(3, rng)
        psi, phi = w[:, 0], w[:, 1]
        if rng.random() < 0.5:
            # QR keeps psi as the first column up to phase: forces membership
            u = np.linalg.qr(np.column_stack([psi, u[:, 1], u[:, 2]]))[0]
        basis = MeasurementBasis(Side.ALICE, list(u.T))
        member = c3_pair_rank1(basis, psi, phi)
        if member != pair_measurement_check(psi, phi, projectors(basis)):
            disagree += 1
    return [Row("13", f"c3 membership vs cross terms ({n})", "full agreement",
                f"{n - disagree}/{n}", disagree == 0)]


SECTIONS: dict[str, Callable] = {
    "tilings": tiling_rows,
    "named": named_rows,
    "bounds": lambda config: bound_rows(),
    "random": random_rows,
    "subset": subset_rows,
    "roundtrip": lambda config: roundtrip_rows(),
    "c3": lambda config: c3_rows(config.seed),
}


def run_regression(config: DecideConfig | None = None, sections=None) -> list[Row]:
    config = config or DecideConfig()
    rows: list[Row] = []
    for name in sections or SECTIONS:
        rows.extend(SECTIONS[name](config))
    return rows
