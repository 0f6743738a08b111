"""Complex linear-algebra kernel.

Vectors and matrices are plain ``numpy`` complex arrays. Everything here is a
pure function of its arguments; randomness only enters through explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

TOL = 1e-9
UNITARY_TOL = 1e-12
DEFAULT_RESTARTS = 32


def as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(-1)


def gram_schmidt(vectors: Sequence, tol: float = TOL) -> list[np.ndarray]:
    """Orthonormalize ``vectors`` in order, dropping those already in the span.

    A vector whose residual norm (after projecting out the earlier survivors)
    falls below ``tol`` is skipped. Two projection sweeps are made per vector,
    which keeps the output orthonormal to machine precision.
    """
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("gram_schmidt needs at least one vector")
    dim = vecs[0].shape[0]
    if any(v.shape[0] != dim for v in vecs):
        raise ValueError("dimension mismatch among input vectors")

    out: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm < tol:
            continue
        out.append(w / norm)
    return out


def complete_basis(vectors: Sequence, dim: int, tol: float = TOL) -> list[np.ndarray]:
    """Gram-Schmidt ``vectors`` and pad with computational basis vectors."""
    seed = [as_vector(v) for v in vectors]
    eye = list(np.eye(dim, dtype=complex))
    basis = gram_schmidt(seed + eye if seed else eye, tol)
    return basis[:dim]


def nullspace(rows, tol: float = TOL) -> list[np.ndarray]:
    """Orthonormal basis of the right nullspace of ``rows``.

    Singular values below ``tol * sigma_max`` count as zero.
    """
    a = np.atleast_2d(np.asarray(rows))
    if a.size == 0:
        raise ValueError("nullspace needs a nonempty row matrix")
    n = a.shape[1]
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return [vh[i].conj() for i in range(rank, n)]


def matrix_rank(vectors: Sequence, tol: float = TOL) -> int:
    """Rank of a stack of vectors with the relative singular-value threshold."""
    if len(vectors) == 0:
        return 0
    a = np.vstack([as_vector(v) for v in vectors])
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def orthocomplement(vectors: Sequence, dim: int, tol: float = TOL) -> list[np.ndarray]:
    """Orthonormal basis of the orthogonal complement of span(vectors) in C^dim."""
    if len(vectors) == 0:
        return list(np.eye(dim, dtype=complex))
    # the nullspace of the conjugated rows is the set of w with <v|w> = 0
    rows = np.vstack([as_vector(v).conj() for v in vectors])
    return nullspace(rows, tol)


# Hermitian real chart: diagonal entries, then (re, im) of strictly-upper
# entries in row-major order.


def hermitian_chart_size(dim: int) -> int:
    return dim * dim


def hermitian_to_coords(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    coords = [h[i, i].real for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            coords.extend((h[i, j].real, h[i, j].imag))
    return np.asarray(coords, dtype=float)


def coords_to_hermitian(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim * dim,):
        raise ValueError(f"expected {dim * dim} chart coordinates, got {x.shape}")
    h = np.zeros((dim, dim), dtype=complex)
    h[np.diag_indices(dim)] = x[:dim]
    pos = dim
    for i in range(dim):
        for j in range(i + 1, dim):
            h[i, j] = x[pos] + 1j * x[pos + 1]
            h[j, i] = x[pos] - 1j * x[pos + 1]
            pos += 2
    return h


def _trace_rows(constraint: np.ndarray, dim: int) -> np.ndarray:
    """Two real rows expressing Re and Im of tr(A T) in chart coordinates."""
    t = np.asarray(constraint, dtype=complex)
    row = np.zeros(dim * dim, dtype=complex)
    # tr(A T) = sum_ij A_ij T_ji
    for i in range(dim):
        row[i] = t[i, i]
    pos = dim
    for i in range(dim):
        for j in range(i + 1, dim):
            # A_ij = re + i im, A_ji = re - i im
            row[pos] = t[j, i] + t[i, j]
            row[pos + 1] = 1j * t[j, i] - 1j * t[i, j]
            pos += 2
    return np.vstack([row.real, row.imag])


@dataclass
class SolutionSpace:
    """Real-linear span of Hermitian matrices solving a trace-constraint system."""

    basis: list[np.ndarray]
    ambient_dim: int
    coords: np.ndarray  # (k, d^2) orthonormal chart coordinates of the basis

    @property
    def dim(self) -> int:
        return len(self.basis)

    def identity_residual(self) -> float:
        """Distance (in chart coordinates) from the identity to the span."""
        ident = hermitian_to_coords(np.eye(self.ambient_dim))
        if self.dim == 0:
            return float(np.linalg.norm(ident))
        proj = self.coords.T @ (self.coords @ ident)
        return float(np.linalg.norm(ident - proj))

    def traceless_residual(self) -> float:
        """Largest norm of a basis element's component orthogonal to the identity."""
        d = self.ambient_dim
        worst = 0.0
        for h in self.basis:
            off = h - np.trace(h) / d * np.eye(d)
            worst = max(worst, float(np.linalg.norm(off)))
        return worst


def hermitian_solution_space(constraints: Sequence, dim: int, tol: float = TOL) -> SolutionSpace:
    """All Hermitian ``A`` with ``tr(A T) = 0`` for every constraint ``T``.

    Returns a real-linear basis obtained as the nullspace of the stacked real
    constraint rows over the Hermitian chart.
    """
    n = dim * dim
    if len(constraints) == 0:
        coords = np.eye(n)
    else:
        blocks = []
        for t in constraints:
            t = np.asarray(t, dtype=complex)
            if t.shape != (dim, dim):
                raise ValueError(f"constraint has shape {t.shape}, expected ({dim}, {dim})")
            blocks.append(_trace_rows(t, dim))
        rows = np.vstack(blocks)
        if not np.any(np.abs(rows) > 0):
            coords = np.eye(n)
        else:
            # rows are real, so the SVD nullspace vectors are real and orthonormal
            null = nullspace(rows, tol)
            coords = np.array([v.real for v in null]).reshape(len(null), n)
    basis = [coords_to_hermitian(c, dim) for c in coords]
    return SolutionSpace(basis=basis, ambient_dim=dim, coords=np.asarray(coords).reshape(-1, n))


# Unitary chart: U = (prod of Givens rotations over pairs i<j, lexicographic) @ diag(phases)


@dataclass(frozen=True)
class UnitaryParams:
    """Parameters of the full U(d) chart.

    ``values`` holds d(d-1)/2 rotation angles, then d(d-1)/2 rotation phases,
    then d diagonal phases: d^2 reals in total.
    """

    values: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.values) != self.dim * self.dim:
            raise ValueError(
                f"U({self.dim}) chart takes {self.dim * self.dim} parameters, got {len(self.values)}"
            )

    @classmethod
    def from_array(cls, x, dim: int) -> "UnitaryParams":
        return cls(tuple(float(v) for v in np.asarray(x, dtype=float).reshape(-1)), dim)

    @property
    def angles(self) -> np.ndarray:
        m = self.dim * (self.dim - 1) // 2
        return np.asarray(self.values[:m])

    @property
    def phases(self) -> np.ndarray:
        m = self.dim * (self.dim - 1) // 2
        return np.asarray(self.values[m:])


def unitary_from_params(p: UnitaryParams) -> np.ndarray:
    d = p.dim
    m = d * (d - 1) // 2
    x = np.asarray(p.values, dtype=float)
    thetas, rot_phases, diag_phases = x[:m], x[m : 2 * m], x[2 * m :]
    u = np.eye(d, dtype=complex)
    k = 0
    for i in range(d):
        for j in range(i + 1, d):
            c, s = np.cos(thetas[k]), np.sin(thetas[k])
            e = np.exp(1j * rot_phases[k])
            g = np.eye(d, dtype=complex)
            g[i, i] = c
            g[i, j] = -np.conj(e) * s
            g[j, i] = e * s
            g[j, j] = c
            u = u @ g
            k += 1
    return u * np.exp(1j * diag_phases)[None, :]


def minimize(
    objective: Callable[[UnitaryParams], float],
    dim: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 42,
    target: float | None = None,
    max_evals: int | None = None,
) -> tuple[UnitaryParams, float]:
    """Multi-start derivative-free minimization over the U(dim) chart.

    Each restart draws its start uniformly from [0, 2pi]^(dim^2) with a
    generator keyed on ``(seed, restart)`` and runs a Powell descent. The best
    value wins, ties going to the lowest restart index. If ``target`` is given,
    restarts stop early once a value below it has been found. Each descent is
    capped at ``max_evals`` objective calls (default 300 per parameter).
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = dim * dim

    def f(x):
        return float(objective(UnitaryParams.from_array(x, dim)))

    best_x, best_val = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x0 = rng.uniform(0.0, 2 * np.pi, size=n)
        if n == 0:
            res_x, res_val = x0, f(x0)
        else:
            res = _scipy_minimize(
                f, x0, method="Powell",
                options={"xtol": 1e-10, "ftol": 1e-15, "maxfev": max_evals or 300 * n},
            )
            res_x, res_val = res.x, float(res.fun)
        if res_val < best_val:
            best_x, best_val = res_x, res_val
        if target is not None and best_val < target:
            break
    return UnitaryParams.from_array(np.mod(best_x, 2 * np.pi), dim), best_val


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]
