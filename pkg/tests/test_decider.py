import json
import time

import numpy as np
import pytest
from oracles import cover_ranks, preserving_dimension

from locclab.decider import (
    DecideConfig,
    NotGloballyOrthogonal,
    PatternLimits,
    Scope,
    SidePolicy,
    Status,
    bound_check,
    c3_pair_rank1,
    decide_one_way,
    find_indistinguishable_subset,
    min_product_bound,
    minimal_vertex_covers,
    op_operator_space,
    optimizer_search,
    pair_measurement_check,
    pattern_search,
    verify_mixed_basis,
    verify_pure_basis,
)
from locclab.decider.verify import projectors
from locclab.numerics import random_unitary
from locclab.states import (
    NAMED_SETS,
    MeasurementBasis,
    MixedState,
    ProductState,
    PureState,
    Side,
    StateSet,
    embed_as_mixed,
    make_named,
    make_tiling,
    product_basis_set,
    random_orthogonal_products,
)

S2 = 1 / np.sqrt(2)
BELL3_FLOOR = 0.5  # min of the bell3 residual objective on a 721 x 721 theta, delta grid


def _two_state_set():
    return StateSet(2, 2, [ProductState([1, 0], [1, 0]), ProductState([0, 1], [0, 1])])


def _grid_bases(n=25):
    for th in np.linspace(0, 2 * np.pi, n):
        for de in np.linspace(0, 2 * np.pi, n):
            phi = [np.cos(th), np.exp(1j * de) * np.sin(th)]
            perp = [-np.exp(-1j * de) * np.sin(th), np.cos(th)]
            yield phi, perp


class TestVerifyPureBasis:
    def test_computational_basis_separates_00_11(self):
        ok, table = verify_pure_basis(_two_state_set(), MeasurementBasis.computational(Side.ALICE, 2))
        assert ok and table.max_offdiag == 0

    def test_bell3_fails_on_whole_grid(self):
        s = make_named("bell3")
        for side in (Side.ALICE, Side.BOB):
            for phi, perp in _grid_bases():
                ok, table = verify_pure_basis(s, MeasurementBasis(side, [phi, perp]))
                assert not ok
                assert table.max_offdiag > 0.1

    def test_quad_3x2_bob_computational(self):
        ok, _ = verify_pure_basis(make_named("quad_3x2"), MeasurementBasis.computational(Side.BOB, 2))
        assert ok

    def test_table_hermitian_in_pair_indices(self):
        rng = np.random.default_rng(0)
        s = random_orthogonal_products(5, 3, 3, rng)
        basis = MeasurementBasis(Side.ALICE, list(random_unitary(3, rng).T))
        _, table = verify_pure_basis(s, basis)
        e = table.entries
        np.testing.assert_allclose(e, e.conj().transpose(0, 2, 1), atol=1e-14)

    def test_residual_table_matches_kron_oracle(self):
        rng = np.random.default_rng(5)
        s = random_orthogonal_products(4, 3, 2, rng)
        u = random_unitary(3, rng)
        basis = MeasurementBasis(Side.ALICE, list(u.T))
        _, table = verify_pure_basis(s, basis)
        for j in range(3):
            etas = [np.array([np.vdot(np.kron(u[:, j], e), k) for e in np.eye(2)]) for k in s.kets()]
            for h in range(4):
                for k in range(4):
                    assert abs(table.entries[j, h, k] - np.vdot(etas[h], etas[k])) < 1e-12

    def test_mixed_members_rejected(self):
        with pytest.raises(TypeError):
            verify_pure_basis(embed_as_mixed(_two_state_set()), MeasurementBasis.computational(Side.ALICE, 2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            verify_pure_basis(_two_state_set(), MeasurementBasis.computational(Side.ALICE, 3))


class TestVerifyMixedBasis:
    def test_classical_mixtures(self):
        s = embed_as_mixed(_two_state_set())
        assert verify_mixed_basis(s, MeasurementBasis.computational(Side.ALICE, 2)).ok

    def test_embedded_bell3_fails_on_grid(self):
        s = embed_as_mixed(make_named("bell3"))
        for phi, perp in _grid_bases(9):
            check = verify_mixed_basis(s, MeasurementBasis(Side.ALICE, [phi, perp]))
            pure_ok, _ = verify_pure_basis(make_named("bell3"), MeasurementBasis(Side.ALICE, [phi, perp]))
            assert check.ok == pure_ok is False

    def test_identical_maximally_mixed(self):
        mm = MixedState(np.eye(4) / 4, 2, 2)
        check = verify_mixed_basis(StateSet(2, 2, [mm, mm]), MeasurementBasis.computational(Side.ALICE, 2))
        assert not check.ok and check.worst is not None

    def test_bob_side(self):
        s = embed_as_mixed(make_named("quad_3x2"))
        assert verify_mixed_basis(s, MeasurementBasis.computational(Side.BOB, 2)).ok

    def test_pure_members_rejected(self):
        with pytest.raises(TypeError):
            verify_mixed_basis(_two_state_set(), MeasurementBasis.computational(Side.ALICE, 2))


class TestOperatorSpace:
    @pytest.mark.parametrize("name", NAMED_SETS)
    def test_dimension_matches_kron_oracle(self, name):
        s = make_named(name)
        for side in (Side.ALICE, Side.BOB):
            assert op_operator_space(s, side).dim == preserving_dimension(s, side.value)

    def test_bell3_trivial_both_sides(self):
        for side in (Side.ALICE, Side.BOB):
            rep = op_operator_space(make_named("bell3"), side)
            assert rep.trivial and rep.certifies
            assert rep.identity_residual < 1e-9

    def test_bell3_solution_is_identity_direction(self):
        rep = op_operator_space(make_named("bell3"), Side.ALICE)
        e = rep.space.basis[0]
        # a00 = a11, a01 = a10 = 0
        assert abs(e[0, 1]) < 1e-12 and abs(e[0, 0] - e[1, 1]) < 1e-12

    def test_00_11_nontrivial(self):
        rep = op_operator_space(_two_state_set(), Side.ALICE)
        assert rep.dim == 4 and not rep.trivial

    @pytest.mark.parametrize("la,lb,dims", [(1, 1, (2, 2)), (1, 2, (2, 3))])
    def test_tiling_dimensions(self, la, lb, dims):
        s = make_tiling(la, lb)
        got = tuple(op_operator_space(s, side).dim for side in (Side.ALICE, Side.BOB))
        assert got == dims == (preserving_dimension(s, "alice"), preserving_dimension(s, "bob"))

    def test_tiling_1_1_extra_solution_is_a_valid_povm_element(self):
        # a full-rank non-identity element preserving orthogonality
        s = make_tiling(1, 1)
        e = np.diag([0, 1, 2, 3]) / 3
        kets = s.kets()
        for lift in (np.kron(e, np.eye(4)), np.kron(np.eye(4), e)):
            worst = max(abs(np.vdot(kets[h], lift @ kets[k]))
                        for h in range(len(kets)) for k in range(h + 1, len(kets)))
            assert worst < 1e-12

    def test_not_orthogonal_raises(self):
        s = StateSet(2, 2, [ProductState([1, 0], [1, 0]), ProductState.of([1, 1], [1, 0])])
        with pytest.raises(NotGloballyOrthogonal):
            op_operator_space(s, Side.ALICE)

    def test_json(self):
        data = op_operator_space(make_named("bell3"), Side.ALICE).to_json()
        assert data["dimension"] == 1 and data["trivial"] is True
        json.dumps(data)


class TestVertexCovers:
    def test_five_cycle(self):
        covers = minimal_vertex_covers(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        assert len(covers) == 5
        assert all(len(c) == 3 for c in covers)

    def test_two_disjoint_edges(self):
        assert minimal_vertex_covers(4, [(0, 1), (2, 3)]) == [(0, 2), (0, 3), (1, 2), (1, 3)]

    def test_limit(self):
        assert minimal_vertex_covers(4, [(0, 1), (2, 3)], limit=3) is None

    def test_no_edges(self):
        assert minimal_vertex_covers(3, []) == [()]


class TestPatternSearch:
    def test_quad_3x2_alice(self):
        v = pattern_search(make_named("quad_3x2"), Side.ALICE)
        cert = v.certificate
        assert v.status is Status.INDISTINGUISHABLE
        assert cert.conflict_pairs == [(0, 1), (2, 3)]
        assert [c for c, _ in cert.covers] == [(0, 2), (0, 3), (1, 2), (1, 3)]
        assert all(d == 1 for _, d in cert.covers)
        assert cert.union_span == 3
        assert cert.largest_orthogonal_family < 3

    def test_quad_3x2_alice_scope_is_projective_with_povm_witness(self):
        s = make_named("quad_3x2")
        v = pattern_search(s, Side.ALICE)
        cert = v.certificate
        assert v.scope is Scope.PROJECTIVE and cert.povm_feasible
        total = sum(w * np.outer(d, d.conj()) for w, d in zip(cert.povm_weights, cert.directions))
        np.testing.assert_allclose(total, np.eye(3), atol=1e-7)

    def test_quad_3x2_is_distinguishable_by_the_witness_povm(self):
        # the witness elements followed by Bob's best measurement identify every state
        s = make_named("quad_3x2")
        cert = pattern_search(s, Side.ALICE).certificate
        for w, d in zip(cert.povm_weights, cert.directions):
            if w < 1e-9:
                continue
            etas = [np.vdot(d, st.a) * st.b for st in s.states]
            for h in range(4):
                for k in range(h + 1, 4):
                    assert abs(np.vdot(etas[h], etas[k])) < 1e-9

    @pytest.mark.parametrize("side", [Side.ALICE, Side.BOB])
    def test_penta_all_covers_rank_three(self, side):
        s = make_named("penta_3x3")
        v = pattern_search(s, side)
        covers = [c for c, _ in v.certificate.covers]
        assert v.status is Status.INDISTINGUISHABLE and v.scope is Scope.POVM
        assert v.certificate.union_empty
        assert cover_ranks(s, side.value, covers) == [3] * len(covers)

    @pytest.mark.parametrize("side", [Side.ALICE, Side.BOB])
    def test_hex_indistinguishable(self, side):
        v = pattern_search(make_named("hex_3x2"), side)
        assert v.status is Status.INDISTINGUISHABLE and v.scope is Scope.POVM

    def test_covers_hit_every_conflict(self):
        s = make_tiling(1, 2)
        for side in (Side.ALICE, Side.BOB):
            cert = pattern_search(s, side).certificate
            for cover, dim_w in cert.covers:
                assert all(h in cover or k in cover for h, k in cert.conflict_pairs)
                d = s.dim(side)
                assert dim_w == d - cover_ranks(s, side.value, [cover])[0]

    def test_distinguishable_basis_reverified(self):
        s = make_named("quad_3x2")
        v = pattern_search(s, Side.BOB)
        assert v.status is Status.DISTINGUISHABLE
        assert verify_pure_basis(s, v.basis)[0]

    def test_cap_gives_undetermined(self):
        v = pattern_search(make_tiling(1, 1), Side.ALICE, PatternLimits(max_covers=2))
        assert v.status is Status.UNDETERMINED and "hitting sets" in v.reason

    def test_non_product_rejected(self):
        with pytest.raises(TypeError):
            pattern_search(make_named("bell3"), Side.ALICE)


class TestOptimizer:
    def test_00_11(self):
        v = optimizer_search(_two_state_set(), Side.ALICE, restarts=4)
        assert v.status is Status.DISTINGUISHABLE
        assert v.certificate.best_value < 1e-12

    def test_quad_3x2_bob(self):
        v = optimizer_search(make_named("quad_3x2"), Side.BOB, restarts=8)
        assert v.status is Status.DISTINGUISHABLE
        # basis ~ computational up to phases
        m = np.abs(v.basis.matrix)
        np.testing.assert_allclose(np.sort(m, axis=0)[-1], [1, 1], atol=1e-5)

    def test_bell3_floor(self):
        v = optimizer_search(make_named("bell3"), Side.ALICE, restarts=32)
        assert v.status is Status.UNDETERMINED
        assert v.certificate.best_value > 0.05
        assert v.certificate.best_value >= BELL3_FLOOR - 1e-6

    def test_never_indistinguishable(self):
        v = optimizer_search(make_tiling(1, 1), Side.ALICE, restarts=2)
        assert v.status is not Status.INDISTINGUISHABLE


class TestDecide:
    def test_random_triples(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            da, db = (int(x) for x in rng.integers(2, 5, 2))
            s = random_orthogonal_products(3, da, db, rng)
            v = decide_one_way(s, "alice")
            assert v.status is Status.DISTINGUISHABLE
            assert verify_pure_basis(s, v.basis)[0]

    def test_tiling_1_1_both(self):
        v = decide_one_way(make_tiling(1, 1), "both")
        assert v.status is Status.INDISTINGUISHABLE
        assert set(v.per_side) == {"alice", "bob"}

    def test_bell3_via_operator_space(self):
        for side in ("alice", "bob"):
            v = decide_one_way(make_named("bell3"), side)
            assert v.status is Status.INDISTINGUISHABLE and v.stage == "operator_space"
        assert decide_one_way(make_named("bell3"), "both").status is Status.INDISTINGUISHABLE

    def test_not_globally_orthogonal(self):
        s = StateSet(2, 2, [ProductState([1, 0], [1, 0]), ProductState.of([1, 1], [1, 1])])
        with pytest.raises(NotGloballyOrthogonal):
            decide_one_way(s)

    def test_policy_parse(self):
        assert SidePolicy.parse("both") is SidePolicy.EITHER_FIRST
        assert SidePolicy.parse(Side.BOB) is SidePolicy.BOB_FIRST

    def test_distinguishable_carries_protocol_and_simulation(self):
        v = decide_one_way(make_named("quad_3x2"), "both")
        assert v.status is Status.DISTINGUISHABLE and v.protocol.first is Side.BOB
        assert verify_pure_basis(make_named("quad_3x2"), v.basis)[0]

    def test_entangled_pair_found_by_optimizer(self):
        # two Bell states: measure Z, then Bob tells them apart
        s = StateSet(2, 2, [
            PureState.from_ket(S2 * np.array([1, 0, 0, 1]), 2, 2),
            PureState.from_ket(S2 * np.array([1, 0, 0, -1]), 2, 2),
        ])
        v = decide_one_way(s, "alice", DecideConfig(restarts=4))
        assert v.status is Status.DISTINGUISHABLE and v.stage == "optimizer"
        assert verify_pure_basis(s, v.basis)[0]

    def test_undetermined_keeps_all_evidence(self):
        cfg = DecideConfig(limits=PatternLimits(max_covers=2), use_optimizer=False)
        v = decide_one_way(make_tiling(1, 1), "alice", cfg)
        assert v.status is Status.UNDETERMINED
        kinds = {type(e).__name__ for e in v.evidence}
        assert {"OperatorSpaceReport", "BoundReport"} <= kinds

    def test_mixed_set_uses_block_condition(self):
        v = decide_one_way(embed_as_mixed(_two_state_set()), "alice")
        assert v.status is Status.DISTINGUISHABLE and v.stage == "mixed_computational"

    def test_json_serializable(self):
        for s in (make_named("penta_3x3"), make_named("quad_3x2"), make_tiling(1, 1)):
            json.dumps(decide_one_way(s, "both").to_json(), sort_keys=True)


class TestProductBasisReplacement:
    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3)])
    def test_product_basis_distinguishable(self, da, db):
        s = product_basis_set(da, db, np.random.default_rng(da * db))
        assert decide_one_way(s, "both").status is Status.DISTINGUISHABLE

    @pytest.mark.parametrize("da,db", [(2, 2), (2, 3)])
    def test_two_entangled_replacements_not_distinguishable(self, da, db):
        s = product_basis_set(da, db)
        k0, k1 = s.states[0].ket(), s.states[-1].ket()
        plus = PureState.from_ket(S2 * (k0 + k1), da, db)
        minus = PureState.from_ket(S2 * (k0 - k1), da, db)
        mixed = StateSet(da, db, [plus, minus] + s.states[1:-1])
        rep = bound_check(mixed)
        assert rep.violated
        v = decide_one_way(mixed, "both", DecideConfig(restarts=4))
        assert v.status is not Status.DISTINGUISHABLE


class TestBounds:
    @pytest.mark.parametrize("args,want", [((2, 2, 3), 2), ((3, 3, 5), 1), ((2, 2, 4), 4), ((2, 2, 2), 0)])
    def test_min_product_bound(self, args, want):
        assert min_product_bound(*args) == want

    def test_bell3_violates(self):
        rep = bound_check(make_named("bell3"))
        assert rep.violated and (rep.product_count, rep.required) == (0, 2)

    def test_product_basis_satisfies(self):
        assert not bound_check(product_basis_set(2, 2)).violated

    def test_bell_pair_plus_products_violates(self):
        s = StateSet(2, 2, [
            PureState.from_ket(S2 * np.array([1, 0, 0, 1]), 2, 2),
            PureState.from_ket(S2 * np.array([1, 0, 0, -1]), 2, 2),
            ProductState([1, 0], [0, 1]),
            ProductState([0, 1], [1, 0]),
        ])
        rep = bound_check(s)
        assert rep.violated and rep.product_count == 2 and rep.required == 4


class TestPairChecks:
    def test_computational_projectors(self):
        assert pair_measurement_check([1, 0], [0, 1], [np.diag([1, 0]), np.diag([0, 1])])

    def test_plus_minus_projectors(self):
        plus = np.full((2, 2), 0.5)
        minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
        assert not pair_measurement_check([1, 0], [0, 1], [plus, minus])

    def test_c3_rotated_basis_keeping_zero(self):
        a, b = 0.6, 0.8j
        basis = [[1, 0, 0], [0, a, b], [0, np.conj(b), -np.conj(a)]]
        assert pair_measurement_check([1, 0, 0], [0, 1, 0], [np.outer(v, np.conj(v)) for v in basis])

    def test_invalid_povm(self):
        with pytest.raises(ValueError):
            pair_measurement_check([1, 0], [0, 1], [np.diag([1, 0])])
        with pytest.raises(ValueError):
            pair_measurement_check([1, 0], [0, 1], [np.diag([2, 1]), np.diag([-1, 0])])

    def test_c3_member(self):
        basis = MeasurementBasis.computational(Side.ALICE, 3)
        assert c3_pair_rank1(basis, [1, 0, 0], [0, S2, S2])

    def test_c3_plus_minus_basis(self):
        basis = MeasurementBasis(Side.ALICE, [[S2, S2, 0], [S2, -S2, 0], [0, 0, 1]])
        assert not c3_pair_rank1(basis, [1, 0, 0], [0, 1, 0])

    def test_c3_random_agreement(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            basis = MeasurementBasis(Side.ALICE, list(random_unitary(3, rng).T))
            w = random_unitary(3, rng)
            got = c3_pair_rank1(basis, w[:, 0], w[:, 1])
            assert got == pair_measurement_check(w[:, 0], w[:, 1], projectors(basis))

    def test_c3_non_orthogonal(self):
        with pytest.raises(ValueError):
            c3_pair_rank1(MeasurementBasis.computational(Side.ALICE, 3), [1, 0, 0], [1, 1, 0])


class TestSubset:
    def test_tiling_1_1_alice(self):
        t = time.perf_counter()
        r = find_indistinguishable_subset(make_tiling(1, 1), "alice")
        assert r.indices is not None and len(r.indices) <= 6
        assert time.perf_counter() - t < 60

    def test_quad_3x2_whole_set(self):
        r = find_indistinguishable_subset(make_named("quad_3x2"), "alice")
        assert r.indices == (0, 1, 2, 3)

    def test_distinguishable_triple_gives_none(self):
        s = random_orthogonal_products(3, 3, 3, np.random.default_rng(0))
        r = find_indistinguishable_subset(s, "both")
        assert r.indices is None and r.reason

    def test_subset_cap(self):
        r = find_indistinguishable_subset(make_tiling(1, 1), "both", max_subsets=10)
        assert r.indices is None and "more than" in r.reason

    def test_smallest_first(self):
        # sizes ascend, so no smaller subset is certified
        r = find_indistinguishable_subset(make_tiling(1, 1), "bob")
        n = len(r.indices)
        r_small = find_indistinguishable_subset(make_tiling(1, 1), "bob", max_size=n - 1)
        assert r_small.indices is None
