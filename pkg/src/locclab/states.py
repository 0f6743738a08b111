"""State-set data model, named constructors and global distinguishability."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .numerics import TOL, as_vector, gram_schmidt, orthocomplement

SQ2 = 1 / np.sqrt(2)


class Side(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> "Side":
        return Side.BOB if self is Side.ALICE else Side.ALICE


def _normalized(v, what: str) -> np.ndarray:
    v = as_vector(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError(f"{what} is the zero vector")
    return v / n


@dataclass
class ProductState:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = as_vector(self.a)
        self.b = as_vector(self.b)
        for name, v in (("a", self.a), ("b", self.b)):
            if abs(np.linalg.norm(v) - 1) > TOL:
                raise ValueError(f"product factor {name} is not normalized")

    @classmethod
    def of(cls, a, b) -> "ProductState":
        """Build from unnormalized factors."""
        return cls(_normalized(a, "a"), _normalized(b, "b"))

    kind = "product"

    @property
    def dims(self) -> tuple[int, int]:
        return self.a.shape[0], self.b.shape[0]

    def coeff(self) -> np.ndarray:
        return np.outer(self.a, self.b)

    def ket(self) -> np.ndarray:
        return np.kron(self.a, self.b)

    def density(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())

    def swapped(self) -> "ProductState":
        return ProductState(self.b, self.a)


@dataclass
class PureState:
    """|psi> = sum_jm C[j, m] |j>_A |m>_B."""

    coeff_matrix: np.ndarray

    def __post_init__(self):
        self.coeff_matrix = np.atleast_2d(np.asarray(self.coeff_matrix, dtype=complex))
        if abs(np.linalg.norm(self.coeff_matrix) - 1) > TOL:
            raise ValueError("pure state coefficient matrix is not normalized")

    kind = "pure"

    @classmethod
    def from_ket(cls, ket, d_a: int, d_b: int) -> "PureState":
        c = np.asarray(ket, dtype=complex).reshape(d_a, d_b)
        return cls(c / np.linalg.norm(c))

    @property
    def dims(self) -> tuple[int, int]:
        return self.coeff_matrix.shape

    def coeff(self) -> np.ndarray:
        return self.coeff_matrix

    def ket(self) -> np.ndarray:
        return self.coeff_matrix.reshape(-1)

    def density(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())

    def swapped(self) -> "PureState":
        return PureState(self.coeff_matrix.T.copy())

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.coeff_matrix, compute_uv=False)


@dataclass
class MixedState:
    rho: np.ndarray
    d_a: int
    d_b: int

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        n = self.d_a * self.d_b
        if self.rho.shape != (n, n):
            raise ValueError(f"density matrix shape {self.rho.shape} does not match {n}x{n}")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(self.rho) - 1) > TOL:
            raise ValueError("density matrix does not have unit trace")
        if np.min(np.linalg.eigvalsh(self.rho)) < -TOL:
            raise ValueError("density matrix is not positive semidefinite")

    kind = "mixed"

    @property
    def dims(self) -> tuple[int, int]:
        return self.d_a, self.d_b

    def density(self) -> np.ndarray:
        return self.rho

    def block(self, m: int, n: int) -> np.ndarray:
        """rho_mn = (<m| x I) rho (|n> x I) in the computational Alice basis."""
        r = self.rho.reshape(self.d_a, self.d_b, self.d_a, self.d_b)
        return r[m, :, n, :]

    def swapped(self) -> "MixedState":
        r = self.rho.reshape(self.d_a, self.d_b, self.d_a, self.d_b)
        r = r.transpose(1, 0, 3, 2).reshape(self.d_a * self.d_b, -1)
        return MixedState(r, self.d_b, self.d_a)


State = Union[ProductState, PureState, MixedState]


@dataclass
class StateSet:
    d_a: int
    d_b: int
    states: list
    labels: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"s{i}" for i in range(len(self.states))]
        if len(self.labels) != len(self.states):
            raise ValueError("labels and states differ in length")
        for i, s in enumerate(self.states):
            if tuple(s.dims) != (self.d_a, self.d_b):
                raise ValueError(
                    f"state {i} ({self.labels[i]}) has dims {tuple(s.dims)}, "
                    f"set is {self.d_a}x{self.d_b}"
                )

    def __len__(self) -> int:
        return len(self.states)

    def dim(self, side: Side) -> int:
        return self.d_a if Side(side) is Side.ALICE else self.d_b

    @property
    def all_product(self) -> bool:
        return all(isinstance(s, ProductState) for s in self.states)

    @property
    def has_mixed(self) -> bool:
        return any(isinstance(s, MixedState) for s in self.states)

    def swapped(self) -> "StateSet":
        """Exchange the roles of Alice and Bob."""
        return StateSet(
            self.d_b, self.d_a, [s.swapped() for s in self.states], list(self.labels), dict(self.meta)
        )

    def oriented(self, side: Side) -> "StateSet":
        """The set with ``side`` in the first (Alice) slot."""
        return self if Side(side) is Side.ALICE else self.swapped()

    def subset(self, indices: Sequence[int]) -> "StateSet":
        return StateSet(
            self.d_a,
            self.d_b,
            [self.states[i] for i in indices],
            [self.labels[i] for i in indices],
        )

    def densities(self) -> list[np.ndarray]:
        return [s.density() for s in self.states]

    def kets(self) -> list[np.ndarray]:
        if self.has_mixed:
            raise TypeError("set contains mixed states")
        return [s.ket() for s in self.states]

    def with_products_detected(self, tol: float = TOL) -> "StateSet":
        """Replace Schmidt-rank-one pure members by explicit ProductStates."""
        out = []
        for s in self.states:
            if isinstance(s, PureState):
                u, sv, vh = np.linalg.svd(s.coeff_matrix)
                if sv.size < 2 or sv[1] < tol:
                    out.append(ProductState.of(u[:, 0] * sv[0], vh[0]))
                    continue
            out.append(s)
        return StateSet(self.d_a, self.d_b, out, list(self.labels), dict(self.meta))


@dataclass
class MeasurementBasis:
    """Complete orthonormal basis on one party; ``vectors[j]`` is basis ket j."""

    side: Side
    vectors: list

    def __post_init__(self):
        self.side = Side(self.side)
        self.vectors = [as_vector(v) for v in self.vectors]
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"basis has {m.shape[1]} vectors in dimension {m.shape[0]}")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > TOL:
            raise ValueError("basis vectors are not orthonormal")

    @property
    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""
        return np.column_stack(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @classmethod
    def computational(cls, side: Side, dim: int) -> "MeasurementBasis":
        return cls(side, list(np.eye(dim, dtype=complex)))


class GlobalCheck(NamedTuple):
    distinguishable: bool
    max_overlap: float
    pair: tuple[int, int] | None


def globally_distinguishable(states: StateSet, tol: float = TOL) -> GlobalCheck:
    """Perfect discrimination with global operations: tr(rho_h rho_k) = 0 for h != k.

    For pure members the reported overlap is |<psi_h|psi_k>|; otherwise the
    Hilbert-Schmidt overlap tr(rho_h rho_k).
    """
    n = len(states)
    pure = not states.has_mixed
    vecs = states.kets() if pure else states.densities()
    worst, pair = 0.0, None
    for h, k in itertools.combinations(range(n), 2):
        if pure:
            ov = abs(np.vdot(vecs[h], vecs[k]))
        else:
            ov = abs(np.trace(vecs[h] @ vecs[k]))
        if pair is None or ov > worst:
            worst, pair = float(ov), (h, k)
    # tr(rho_h rho_k) = |<psi_h|psi_k>|^2 for pure members
    measure = worst**2 if pure else worst
    return GlobalCheck(measure < tol, worst, pair)


def residual_rows(state, basis: MeasurementBasis) -> np.ndarray:
    """Unnormalized conditional states left on the other party.

    Row j is eta_j = (<j| x I)|psi> when ``basis`` is Alice's, or
    (I x <j|)|psi> when it is Bob's.
    """
    if isinstance(state, MixedState):
        raise TypeError("residual rows are defined for pure states only")
    c = state.coeff()
    if basis.side is Side.BOB:
        c = c.T
    if c.shape[0] != basis.dim:
        raise ValueError(f"basis dimension {basis.dim} does not match party dimension {c.shape[0]}")
    return basis.matrix.conj().T @ c


def reassemble(rows: np.ndarray, basis: MeasurementBasis) -> np.ndarray:
    """Inverse of ``residual_rows``: sum_j |j> x |eta_j> as a coefficient matrix."""
    c = basis.matrix @ rows
    return c.T if basis.side is Side.BOB else c


# --- tilings -----------------------------------------------------------------


def _progression(start: int, step: int, stop: int) -> list[int]:
    """Inclusive arithmetic progression ``start, start+step, ..., stop``."""
    if step > 0:
        return list(range(start, stop + 1, step))
    return list(range(start, stop - 1, step))


def _domino(d: int, i: int, sign: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 0.5
    v[i + 1] = sign * SQ2
    v[i + 2] = 0.5
    return v


def _basis_ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def tiling_count(l_a: int, l_b: int) -> int:
    return 4 * l_a * l_b + 7 * l_a + 3 * l_b - 3


def make_tiling(l_a: int, l_b: int) -> StateSet:
    """The domino tiling of C^(3 l_a + 1) x C^(3 l_b + 1).

    Families: horizontal dominoes |a>(b, b+1, b+2)+- , vertical dominoes
    (a, a+1, a+2)+-|b>, the column |3 l_a - 1>|c> and the row |q>|3 l_b - 1>.
    Index progressions follow the printed ranges literally. Any tile that would
    leave the grid is skipped and recorded in ``meta["out_of_range"]``.
    """
    if not (1 <= l_a <= l_b):
        raise ValueError(f"tiling requires 1 <= l_a <= l_b, got l_a={l_a}, l_b={l_b}")
    d_a, d_b = 3 * l_a + 1, 3 * l_b + 1

    horizontal = []  # (a, b): Alice ket |a>, Bob domino starting at b
    for a1 in range(l_a):
        for b1 in _progression(a1, 3, 3 * l_b - 2 * a1 - 3):
            horizontal.append((a1, b1))
    for a2 in _progression(3 * l_a, -2, 3 * l_a - 2 * (l_a - 1)):
        s = (3 * l_a - a2) // 2
        for b2 in _progression(s + 1, 3, 3 * l_b - (3 * l_a - a2) - 2):
            horizontal.append((a2, b2))

    vertical = []  # (a, b): Alice domino starting at a, Bob ket |b>
    for b1 in range(l_a):
        for a1 in _progression(b1 + 1, 3, 3 * l_a - 2 * b1 - 2):
            vertical.append((a1, b1))
    for b2 in _progression(3 * l_b, -2, 3 * l_b - 2 * (l_a - 1)):
        s = (3 * l_b - b2) // 2
        for a2 in _progression(s, 3, 3 * l_a - (3 * l_b - b2) - 3):
            vertical.append((a2, b2))

    states, labels, out_of_range = [], [], []
    for a, b in sorted(horizontal):
        if not (0 <= a < d_a and 0 <= b and b + 2 < d_b):
            out_of_range.append(("F1", a, b))
            continue
        for sign, tag in ((1, "+"), (-1, "-")):
            states.append(ProductState(_basis_ket(d_a, a), _domino(d_b, b, sign)))
            labels.append(f"F1{tag}:a={a},b={b}")
    for a, b in sorted(vertical):
        if not (0 <= a and a + 2 < d_a and 0 <= b < d_b):
            out_of_range.append(("F2", a, b))
            continue
        for sign, tag in ((1, "+"), (-1, "-")):
            states.append(ProductState(_domino(d_a, a, sign), _basis_ket(d_b, b)))
            labels.append(f"F2{tag}:a={a},b={b}")
    for c in range(1, 3 * l_b):
        states.append(ProductState(_basis_ket(d_a, 3 * l_a - 1), _basis_ket(d_b, c)))
        labels.append(f"F3:a={3 * l_a - 1},b={c}")
    for q in range(1, 3 * l_a - 1):
        states.append(ProductState(_basis_ket(d_a, q), _basis_ket(d_b, 3 * l_b - 1)))
        labels.append(f"F4:a={q},b={3 * l_b - 1}")

    meta = {"kind": "tiling", "l_a": l_a, "l_b": l_b, "out_of_range": out_of_range}
    return StateSet(d_a, d_b, states, labels, meta)


# --- named sets ---------------------------------------------------------------

NAMED_SETS = ("bell3", "quad_3x2", "groisman_2x2", "penta_3x3", "hex_3x2")


def _k(d: int, *amps) -> np.ndarray:
    return np.asarray(amps, dtype=complex).reshape(d)


def make_named(name: str) -> StateSet:
    if name == "bell3":
        phi0 = PureState(SQ2 * np.array([[1, 0], [0, 1]]))
        phi1 = PureState(SQ2 * np.array([[1, 0], [0, -1]]))
        phi2 = PureState(SQ2 * np.array([[0, 1], [1, 0]]))
        return StateSet(2, 2, [phi0, phi1, phi2], ["Phi0", "Phi1", "Phi2"], {"kind": "bell3"})
    if name == "quad_3x2":
        states = [
            ProductState.of(_k(3, 1, 1, 0), _k(2, 1, 0)),
            ProductState.of(_k(3, 1, -1, 0), _k(2, 1, 0)),
            ProductState.of(_k(3, 0, 1, 1), _k(2, 0, 1)),
            ProductState.of(_k(3, 0, 1, -1), _k(2, 0, 1)),
        ]
        return StateSet(3, 2, states, ["psi1", "psi2", "psi3", "psi4"], {"kind": "quad_3x2"})
    if name == "groisman_2x2":
        states = [
            ProductState.of(_k(2, 1, 0), _k(2, 1, 0)),
            ProductState.of(_k(2, 0, 1), _k(2, 1, 0)),
            ProductState.of(_k(2, 1, 1), _k(2, 0, 1)),
            ProductState.of(_k(2, 1, -1), _k(2, 0, 1)),
        ]
        return StateSet(2, 2, states, ["phi0", "phi1", "phi2", "phi3"], {"kind": "groisman_2x2"})
    if name == "penta_3x3":
        states = [
            ProductState.of(_k(3, 1, 0, 0), _k(3, 1, 0, 0)),
            ProductState.of(_k(3, 0, 0, 1), _k(3, 1, -1, 1)),
            ProductState.of(_k(3, 1, 1, 0), _k(3, 0, 0, 1)),
            ProductState.of(_k(3, 1, -1, 1), _k(3, 0, 1, 1)),
            ProductState.of(_k(3, 0, 1, 1), _k(3, 1, 1, 0)),
        ]
        return StateSet(3, 3, states, [f"Psi{k}" for k in range(5)], {"kind": "penta_3x3"})
    if name == "hex_3x2":
        states = [
            ProductState.of(_k(3, 1, 0, 0), _k(2, 1, 0)),
            ProductState.of(_k(3, 0, 1, 0), _k(2, 1, 0)),
            ProductState.of(_k(3, 1, 1, 0), _k(2, 0, 1)),
            ProductState.of(_k(3, 1, -1, 0), _k(2, 0, 1)),
            ProductState.of(_k(3, 0, 0, 1), _k(2, 1, 1)),
            ProductState.of(_k(3, 0, 0, 1), _k(2, 1, -1)),
        ]
        return StateSet(3, 2, states, [f"Psi{k}" for k in range(1, 7)], {"kind": "hex_3x2"})
    raise ValueError(f"unknown named set {name!r}; choose from {', '.join(NAMED_SETS)}")


# --- random orthogonal product sets ------------------------------------------


def _random_unit(dim: int, rng: np.random.Generator, within: list | None = None) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if within is not None:
        z = sum(rng.standard_normal() * w + 1j * rng.standard_normal() * w for w in within)
    return z / np.linalg.norm(z)


def random_orthogonal_products(
    n: int, d_a: int, d_b: int, rng: np.random.Generator, p_alice: float = 0.5
) -> StateSet:
    """Random pairwise-orthogonal product states.

    For each new state, every earlier state is assigned a party on which the
    two must be orthogonal; the new factor is then drawn from the orthogonal
    complement of the assigned earlier factors. Assignments that leave an empty
    complement are redrawn. Occasionally a factor is copied from an earlier
    state (up to phase) so that degenerate overlap patterns are also produced.
    """
    if n > d_a * d_b:
        raise ValueError(f"{n} orthogonal states do not fit in {d_a} x {d_b}")
    for _ in range(1000):
        a_parts: list[np.ndarray] = []
        b_parts: list[np.ndarray] = []
        ok = True
        for k in range(n):
            for _attempt in range(50):
                on_alice = [h for h in range(k) if rng.random() < p_alice]
                on_bob = [h for h in range(k) if h not in on_alice]
                wa = orthocomplement([a_parts[h] for h in on_alice], d_a)
                wb = orthocomplement([b_parts[h] for h in on_bob], d_b)
                if wa and wb:
                    break
            else:
                ok = False
                break
            a = _random_unit(d_a, rng, wa)
            b = _random_unit(d_b, rng, wb)
            # now and then align a factor with an earlier one (projected into
            # the allowed subspace) to produce degenerate overlap patterns
            if k and rng.random() < 0.2:
                h = int(rng.integers(k))
                a_proj = sum(np.vdot(w, a_parts[h]) * w for w in wa)
                if np.linalg.norm(a_proj) > 0.5:
                    a = a_proj / np.linalg.norm(a_proj)
            if k and rng.random() < 0.2:
                h = int(rng.integers(k))
                b_proj = sum(np.vdot(w, b_parts[h]) * w for w in wb)
                if np.linalg.norm(b_proj) > 0.5:
                    b = b_proj / np.linalg.norm(b_proj)
            a_parts.append(a)
            b_parts.append(b)
        if ok:
            states = [ProductState(a, b) for a, b in zip(a_parts, b_parts)]
            return StateSet(d_a, d_b, states)
    raise RuntimeError("could not draw an orthogonal product set with these dimensions")


def embed_as_mixed(states: StateSet) -> StateSet:
    """Rank-one density-matrix version of a pure set."""
    mixed = [MixedState(s.density(), states.d_a, states.d_b) for s in states.states]
    return StateSet(states.d_a, states.d_b, mixed, list(states.labels))


def product_basis_set(d_a: int, d_b: int, rng: np.random.Generator | None = None) -> StateSet:
    """A complete orthonormal product basis (random local bases if ``rng`` is given)."""
    if rng is None:
        ua, ub = np.eye(d_a), np.eye(d_b)
    else:
        from .numerics import random_unitary

        ua, ub = random_unitary(d_a, rng), random_unitary(d_b, rng)
    states = [ProductState(ua[:, i], ub[:, j]) for i in range(d_a) for j in range(d_b)]
    labels = [f"{i}{j}" for i in range(d_a) for j in range(d_b)]
    return StateSet(d_a, d_b, states, labels)


def state_set_to_json(states: StateSet) -> dict:
    def cvec(v):
        return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]

    def cmat(m):
        return [cvec(row) for row in np.asarray(m)]

    out = []
    for s in states.states:
        if isinstance(s, ProductState):
            out.append({"kind": "product", "a": cvec(s.a), "b": cvec(s.b)})
        elif isinstance(s, PureState):
            out.append({"kind": "pure", "coeff": cmat(s.coeff_matrix)})
        else:
            out.append({"kind": "mixed", "rho": cmat(s.rho)})
    return {"dA": states.d_a, "dB": states.d_b, "states": out, "labels": list(states.labels)}


def _parse_cvec(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_set_from_json(data: dict) -> StateSet:
    try:
        d_a, d_b = int(data["dA"]), int(data["dB"])
        raw = data["states"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"state-set JSON is missing field {exc}") from exc
    states = []
    for i, s in enumerate(raw):
        kind = s.get("kind")
        if kind == "product":
            states.append(ProductState(_parse_cvec(s["a"]), _parse_cvec(s["b"])))
        elif kind == "pure":
            states.append(PureState(_parse_cvec(s["coeff"])))
        elif kind == "mixed":
            states.append(MixedState(_parse_cvec(s["rho"]), d_a, d_b))
        else:
            raise ValueError(f"state {i}: unknown kind {kind!r}")
    return StateSet(d_a, d_b, states, list(data.get("labels") or []))
