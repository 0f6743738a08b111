from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..states import MeasurementBasis, Side


class Status(str, enum.Enum):
    DISTINGUISHABLE = "Distinguishable"
    INDISTINGUISHABLE = "Indistinguishable"
    UNDETERMINED = "Undetermined"


class SidePolicy(str, enum.Enum):
    ALICE_FIRST = "AliceFirst"
    BOB_FIRST = "BobFirst"
    EITHER_FIRST = "EitherFirst"

    @classmethod
    def parse(cls, value) -> "SidePolicy":
        if isinstance(value, SidePolicy):
            return value
        if isinstance(value, Side):
            return cls.ALICE_FIRST if value is Side.ALICE else cls.BOB_FIRST
        aliases = {"alice": cls.ALICE_FIRST, "bob": cls.BOB_FIRST, "both": cls.EITHER_FIRST,
                   "either": cls.EITHER_FIRST}
        key = str(value)
        if key.lower() in aliases:
            return aliases[key.lower()]
        return cls(key)

    @property
    def side(self) -> Side | None:
        return {SidePolicy.ALICE_FIRST: Side.ALICE, SidePolicy.BOB_FIRST: Side.BOB}.get(self)


class Scope(str, enum.Enum):
    """What an Indistinguishable certificate rules out.

    ``povm``: every orthogonality-preserving rank-one POVM on the first party
    is trivial or cannot resolve the identity, so no one-way protocol exists.
    ``projective``: no orthonormal first-measurement basis satisfies the
    residual-orthogonality condition.
    """

    POVM = "povm"
    PROJECTIVE = "projective"


def cvec_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def basis_json(basis: MeasurementBasis) -> dict:
    return {"side": basis.side.value, "vectors": [cvec_json(v) for v in basis.vectors]}


@dataclass
class ResidualTable:
    """entries[j, h, k] = <eta_j^h | eta_j^k>."""

    entries: np.ndarray

    @property
    def max_offdiag(self) -> float:
        e = self.entries
        n = e.shape[1]
        if n < 2:
            return 0.0
        mask = ~np.eye(n, dtype=bool)
        return float(np.max(np.abs(e[:, mask])))

    def worst(self) -> tuple[int, int, int] | None:
        e = np.abs(self.entries.copy())
        n = e.shape[1]
        if n < 2:
            return None
        e[:, np.arange(n), np.arange(n)] = -1
        j, h, k = np.unravel_index(np.argmax(e), e.shape)
        return int(j), int(h), int(k)

    def to_json(self) -> dict:
        return {"max_offdiag": self.max_offdiag, "worst": self.worst()}


@dataclass
class Verdict:
    status: Status
    side_policy: SidePolicy
    stage: str
    certificate: Any = None
    basis: MeasurementBasis | None = None
    scope: Scope | None = None
    protocol: Any = None
    evidence: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    reason: str = ""
    per_side: dict = field(default_factory=dict)

    @property
    def conclusive(self) -> bool:
        return self.status is not Status.UNDETERMINED

    def to_json(self) -> dict:
        out: dict = {
            "status": self.status.value,
            "side_policy": self.side_policy.value,
            "stage": self.stage,
        }
        if self.scope is not None:
            out["scope"] = self.scope.value
        if self.reason:
            out["reason"] = self.reason
        if self.basis is not None:
            out["basis"] = basis_json(self.basis)
        if self.certificate is not None:
            out["certificate"] = _to_json(self.certificate)
        if self.protocol is not None:
            out["protocol"] = self.protocol.to_json()
        if self.evidence:
            out["evidence"] = [_to_json(e) for e in self.evidence]
        if self.warnings:
            out["warnings"] = list(self.warnings)
        if self.per_side:
            out["per_side"] = {k: v.to_json() for k, v in self.per_side.items()}
        return out


def _to_json(obj):
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {k: _to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_json(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
