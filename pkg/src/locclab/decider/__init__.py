"""One-way LOCC decision pipeline."""

from .bounds import BoundReport, bound_check, is_product, min_product_bound
from .operator_space import NotGloballyOrthogonal, OperatorSpaceReport, op_operator_space
from .optimize import optimizer_search
from .patterns import CoverCertificate, PatternLimits, minimal_vertex_covers, pattern_search
from .pipeline import DecideConfig, SubsetResult, decide_one_way, find_indistinguishable_subset
from .verdict import ResidualTable, Scope, SidePolicy, Status, Verdict
from .verify import c3_pair_rank1, pair_measurement_check, verify_mixed_basis, verify_pure_basis

__all__ = [
    "BoundReport", "CoverCertificate", "DecideConfig", "NotGloballyOrthogonal",
    "OperatorSpaceReport", "PatternLimits", "ResidualTable", "Scope", "SidePolicy", "Status",
    "SubsetResult", "Verdict", "bound_check", "c3_pair_rank1", "decide_one_way",
    "find_indistinguishable_subset", "is_product", "min_product_bound", "minimal_vertex_covers",
    "op_operator_space", "optimizer_search", "pair_measurement_check", "pattern_search",
    "verify_mixed_basis", "verify_pure_basis",
]
