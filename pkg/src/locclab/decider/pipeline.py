"""Staged one-way decision procedure and minimal-subset search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..numerics import DEFAULT_RESTARTS, TOL
from ..states import MeasurementBasis, Side, StateSet
from .bounds import bound_check
from .operator_space import op_operator_space, require_orthogonal
from .optimize import OBJECTIVE_TOL, optimizer_search
from .patterns import PatternLimits, pattern_search
from .verdict import Scope, SidePolicy, Status, Verdict
from .verify import verify_mixed_basis, verify_pure_basis


@dataclass
class DecideConfig:
    tol: float = TOL
    seed: int = 42
    restarts: int = DEFAULT_RESTARTS
    objective_tol: float = OBJECTIVE_TOL
    limits: PatternLimits = field(default_factory=PatternLimits)
    use_optimizer: bool = True

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "seed": self.seed,
            "restarts": self.restarts,
            "objective_tol": self.objective_tol,
            "max_covers": self.limits.max_covers,
        }


def _fast_path(states: StateSet, side: Side, tol: float) -> Verdict | None:
    # imported here: protocol depends on decider submodules
    from ..protocol import protocol_from_basis, synth_four, synth_three

    n = len(states)
    policy = SidePolicy.parse(side)
    if n <= 3:
        proto = synth_three(states.oriented(side), tol)
        basis = MeasurementBasis(side, proto.first_basis.vectors)
        stage = "synth_three"
    elif n == 4:
        proto = synth_four(states, tol)
        if proto.first is not side:
            return None
        basis = proto.first_basis
        stage = "synth_four"
    else:
        return None
    ok, table = verify_pure_basis(states, basis, tol)
    if not ok:
        raise AssertionError(f"{stage} produced a basis failing verification")
    verdict = Verdict(Status.DISTINGUISHABLE, policy, stage, certificate=table, basis=basis)
    verdict.protocol = protocol_from_basis(states, basis, tol)
    verdict.warnings.extend(proto.notes)
    return verdict


def _decide_mixed(states: StateSet, side: Side, config: DecideConfig) -> Verdict:
    policy = SidePolicy.parse(side)
    basis = MeasurementBasis.computational(side, states.dim(side))
    check = verify_mixed_basis(states, basis, config.tol)
    if check.ok:
        return Verdict(Status.DISTINGUISHABLE, policy, "mixed_computational", certificate=check,
                       basis=basis)
    return Verdict(Status.UNDETERMINED, policy, "mixed",
                   reason="mixed members: only the computational basis is checked")


def _decide_side(
    states: StateSet, side: Side, config: DecideConfig, optimize: bool = True
) -> Verdict:
    if states.has_mixed:
        return _decide_mixed(states, side, config)
    tol = config.tol
    policy = SidePolicy.parse(side)
    evidence: list = []
    warnings: list = []

    if states.all_product:
        fast = _fast_path(states, side, tol)
        if fast is not None:
            return fast
        verdict = pattern_search(states, side, config.limits, tol)
        warnings.extend(verdict.warnings)
        if verdict.status is Status.DISTINGUISHABLE:
            return verdict
        pattern_verdict = verdict
    else:
        pattern_verdict = None

    report = op_operator_space(states, side, tol)
    evidence.append(report)
    if report.certifies:
        return Verdict(Status.INDISTINGUISHABLE, policy, "operator_space", certificate=report,
                       scope=Scope.POVM, evidence=evidence, warnings=warnings,
                       reason="only multiples of the identity preserve orthogonality")
    if pattern_verdict is not None and pattern_verdict.status is Status.INDISTINGUISHABLE:
        pattern_verdict.evidence.extend(evidence)
        return pattern_verdict
    if pattern_verdict is not None:
        evidence.insert(0, pattern_verdict.certificate)

    bound = bound_check(states, tol)
    if bound.violated:
        return Verdict(Status.INDISTINGUISHABLE, policy, "product_count_bound", certificate=bound,
                       scope=Scope.PROJECTIVE, evidence=evidence, warnings=warnings,
                       reason=f"{bound.product_count} product members, at least "
                              f"{bound.required} needed")
    evidence.append(bound)

    if optimize and config.use_optimizer:
        opt = optimizer_search(states, side, config.restarts, config.seed, tol,
                               config.objective_tol)
        if opt.status is Status.DISTINGUISHABLE:
            opt.evidence = evidence + opt.evidence
            opt.warnings = warnings + opt.warnings
            return opt
        evidence.append(opt.certificate)
        reason = opt.reason
    else:
        reason = "optimizer disabled"
    if pattern_verdict is not None and pattern_verdict.reason:
        reason = f"{pattern_verdict.reason}; {reason}"
    return Verdict(Status.UNDETERMINED, policy, "exhausted", evidence=evidence,
                   warnings=warnings, reason=reason)


def _attach_protocol(verdict: Verdict, states: StateSet, tol: float) -> None:
    from ..protocol import protocol_from_basis, simulate

    if verdict.protocol is None and not states.has_mixed:
        verdict.protocol = protocol_from_basis(states, verdict.basis, tol)
    if verdict.protocol is not None:
        verdict.evidence.append(simulate(verdict.protocol, states))


def decide_one_way(states: StateSet, side="both", config: DecideConfig | None = None) -> Verdict:
    """Decide one-way LOCC distinguishability with the given party (or either) first.

    Raises ``NotGloballyOrthogonal`` if some pair already overlaps. Every
    Distinguishable verdict carries a verified basis, a protocol and its
    simulation report.
    """
    config = config or DecideConfig()
    policy = SidePolicy.parse(side)
    require_orthogonal(states, config.tol)
    states = states.with_products_detected(config.tol)

    if policy.side is not None:
        verdict = _decide_side(states, policy.side, config)
        if verdict.status is Status.DISTINGUISHABLE:
            _attach_protocol(verdict, states, config.tol)
        return verdict

    # certificate stages on both sides before any optimizer run
    per_side = {}
    for optimize in (False, True):
        for s in (Side.ALICE, Side.BOB):
            if optimize and per_side[s.value].conclusive:
                continue
            v = _decide_side(states, s, config, optimize)
            per_side[s.value] = v
            if v.status is Status.DISTINGUISHABLE:
                _attach_protocol(v, states, config.tol)
                return Verdict(Status.DISTINGUISHABLE, policy, v.stage, certificate=v.certificate,
                               basis=v.basis, protocol=v.protocol, evidence=v.evidence,
                               warnings=v.warnings, reason=f"{s.value} first", per_side=per_side)
        if all(v.conclusive for v in per_side.values()):
            break
    statuses = {v.status for v in per_side.values()}
    if statuses == {Status.INDISTINGUISHABLE}:
        scopes = {v.scope for v in per_side.values()}
        scope = Scope.POVM if scopes == {Scope.POVM} else Scope.PROJECTIVE
        return Verdict(Status.INDISTINGUISHABLE, policy, "both_sides", scope=scope,
                       reason="certified on both sides", per_side=per_side)
    return Verdict(Status.UNDETERMINED, policy, "both_sides",
                   reason="no conclusive verdict on at least one side", per_side=per_side)


@dataclass
class SubsetResult:
    indices: tuple[int, ...] | None
    verdict: Verdict | None
    examined: int
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices) if self.indices is not None else None,
            "examined": self.examined,
            "reason": self.reason,
            "verdict": self.verdict.to_json() if self.verdict is not None else None,
        }


def _certify_side(states: StateSet, side: Side, config: DecideConfig) -> Verdict:
    if states.all_product:
        v = pattern_search(states, side, config.limits, config.tol)
        if v.status is not Status.UNDETERMINED:
            return v
    if states.has_mixed:
        return Verdict(Status.UNDETERMINED, SidePolicy.parse(side), "subset",
                       reason="mixed members")
    report = op_operator_space(states, side, config.tol)
    if report.certifies:
        return Verdict(Status.INDISTINGUISHABLE, SidePolicy.parse(side), "operator_space",
                       certificate=report, scope=Scope.POVM)
    return Verdict(Status.UNDETERMINED, SidePolicy.parse(side), "subset", evidence=[report])


def find_indistinguishable_subset(
    states: StateSet,
    side="both",
    max_size: int = 6,
    config: DecideConfig | None = None,
    max_subsets: int = 1_000_000,
) -> SubsetResult:
    """Smallest subset carrying an Indistinguishable certificate.

    Subsets are tried by size, then lexicographically; only the certificate
    stages run (no optimizer). With ``side="both"`` both parties must be
    certified.
    """
    config = config or DecideConfig()
    policy = SidePolicy.parse(side)
    require_orthogonal(states, config.tol)
    states = states.with_products_detected(config.tol)
    sides = [policy.side] if policy.side is not None else [Side.ALICE, Side.BOB]
    examined = 0
    for size in range(2, min(max_size, len(states)) + 1):
        for idx in itertools.combinations(range(len(states)), size):
            examined += 1
            if examined > max_subsets:
                return SubsetResult(None, None, examined - 1,
                                    f"more than {max_subsets} subsets examined")
            sub = states.subset(idx)
            verdicts = {}
            for s in sides:
                v = _certify_side(sub, s, config)
                if v.status is not Status.INDISTINGUISHABLE:
                    break
                verdicts[s.value] = v
            else:
                if len(sides) == 1:
                    return SubsetResult(idx, verdicts[sides[0].value], examined)
                scopes = {v.scope for v in verdicts.values()}
                combined = Verdict(
                    Status.INDISTINGUISHABLE, policy, "subset",
                    scope=Scope.POVM if scopes == {Scope.POVM} else Scope.PROJECTIVE,
                    per_side=verdicts,
                )
                return SubsetResult(idx, combined, examined)
    return SubsetResult(None, None, examined,
                        f"no certified subset of size <= {max_size}")

