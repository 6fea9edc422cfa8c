"""Finite-dimensional Hilbert-space primitives: kets, operators, projectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, overload

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDirection,
    NotAProjector,
    NotUnitary,
    UnnormalizedState,
    ZeroSpan,
)
from .tolerance import get_tol

# relative residual cutoff used when deciding the rank of a span
SPAN_RANK_CUTOFF = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.flags.writeable = False
    return arr


def max_abs(arr: np.ndarray) -> float:
    """Max-entry norm; 0.0 for empty arrays."""
    arr = np.asarray(arr)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


class Ket:
    """Complex amplitude vector. Immutable; normalization is never implied."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        arr = _frozen(np.ravel(np.asarray(amplitudes, dtype=np.complex128)))
        if arr.size < 1:
            raise DimensionMismatch("a ket needs at least one amplitude")
        self.amplitudes = arr

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float | None = None) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= get_tol(tol)

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __repr__(self) -> str:
        return f"Ket({np.array2string(self.amplitudes, precision=6)})"


class Operator:
    """Square complex matrix acting on a ``dim``-dimensional space."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        arr = _frozen(np.asarray(matrix, dtype=np.complex128))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionMismatch(f"operator must be a nonempty square matrix, got shape {arr.shape}")
        self.matrix = arr

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> Operator:
        return Operator(self.matrix.conj().T)

    def is_hermitian(self, tol: float | None = None) -> bool:
        return max_abs(self.matrix - self.matrix.conj().T) <= get_tol(tol)

    def is_unitary(self, tol: float | None = None) -> bool:
        return max_abs(self.matrix.conj().T @ self.matrix - np.eye(self.dim)) <= get_tol(tol)

    @overload
    def __matmul__(self, other: Ket) -> Ket: ...
    @overload
    def __matmul__(self, other: Operator) -> Operator: ...

    def __matmul__(self, other):
        if isinstance(other, Ket):
            _check_dims(self.dim, other.dim)
            return Ket(self.matrix @ other.amplitudes)
        if isinstance(other, Operator):
            _check_dims(self.dim, other.dim)
            return Operator(self.matrix @ other.matrix)
        return NotImplemented

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class Projector(Operator):
    """Hermitian idempotent operator, validated on construction."""

    __slots__ = ()

    def __init__(self, matrix, tol: float | None = None):
        super().__init__(matrix)
        tol = get_tol(tol)
        m = self.matrix
        herm = max_abs(m - m.conj().T)
        idem = max_abs(m @ m - m)
        if herm > tol or idem > tol:
            raise NotAProjector(
                f"not a projector: hermiticity defect {herm:.3g}, idempotency defect {idem:.3g}"
            )
        eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if np.any(np.minimum(np.abs(eig), np.abs(eig - 1.0)) > tol):
            raise NotAProjector("eigenvalues are not all 0 or 1")

    @property
    def rank(self) -> int:
        return rank(self)


def _check_dims(*dims: int) -> None:
    if len(set(dims)) > 1:
        raise DimensionMismatch(f"dimension mismatch: {', '.join(map(str, dims))}")


def rank(op: Operator | np.ndarray) -> int:
    """Count of eigenvalues above 1/2; exact for (near-)projectors."""
    m = np.asarray(getattr(op, "matrix", op))
    eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return int(np.count_nonzero(eig > 0.5))


def operators_close(a: Operator, b: Operator, tol: float | None = None) -> bool:
    _check_dims(a.dim, b.dim)
    return max_abs(a.matrix - b.matrix) <= get_tol(tol)


def identity(dim: int) -> Projector:
    return Projector(np.eye(dim))


def zero_projector(dim: int) -> Projector:
    return Projector(np.zeros((dim, dim)))


def basis_ket(dim: int, index: int) -> Ket:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return Ket(v)


def normalize(psi: Ket) -> Ket:
    n = psi.norm()
    if n == 0.0:
        raise ZeroSpan("cannot normalize the zero vector")
    return Ket(psi.amplitudes / n)


def inner_product(phi: Ket, psi: Ket) -> complex:
    """<phi|psi>, conjugate-linear in ``phi``."""
    _check_dims(phi.dim, psi.dim)
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def ket_projector(psi: Ket, tol: float | None = None) -> Projector:
    """The rank-one projector [psi] = |psi><psi| for a normalized ket."""
    if not psi.is_normalized(tol):
        raise UnnormalizedState(f"<psi|psi> = {psi.norm() ** 2:.12g}")
    v = psi.amplitudes
    return Projector(np.outer(v, v.conj()), tol=tol)


def _orthonormal_basis(vectors: np.ndarray, cutoff: float = SPAN_RANK_CUTOFF) -> np.ndarray:
    """Pivoted modified Gram-Schmidt with one re-orthogonalization pass.

    ``vectors`` has shape (k, dim). Returns an (r, dim) array of orthonormal
    rows spanning the numerical span; a residual is accepted while it exceeds
    ``cutoff`` times the largest input norm.
    """
    work = np.array(vectors, dtype=np.complex128, copy=True)
    scale = max(float(np.max(np.linalg.norm(work, axis=1))), 0.0)
    basis: list[np.ndarray] = []
    if scale == 0.0:
        return np.zeros((0, work.shape[1]), dtype=np.complex128)
    remaining = list(range(work.shape[0]))
    while remaining and len(basis) < work.shape[1]:
        norms = [np.linalg.norm(work[i]) for i in remaining]
        pick = int(np.argmax(norms))
        if norms[pick] <= cutoff * scale:
            break
        i = remaining.pop(pick)
        v = work[i].copy()
        for _ in range(2):
            for q in basis:
                v -= np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv <= cutoff * scale:
            continue
        q = v / nv
        basis.append(q)
        for j in remaining:
            work[j] -= np.vdot(q, work[j]) * q
    if not basis:
        return np.zeros((0, work.shape[1]), dtype=np.complex128)
    return np.array(basis)


def projector_onto_rows(rows: np.ndarray, dim: int, tol: float | None = None) -> Projector:
    """Projector built from orthonormal rows (sum of rank-one projectors)."""
    if len(rows) == 0:
        return zero_projector(dim)
    rows = np.asarray(rows)
    m = rows.T @ rows.conj()
    return Projector((m + m.conj().T) / 2, tol=tol)


def projector_from_span(kets: Sequence[Ket], tol: float | None = None) -> Projector:
    """Orthogonal projector onto the span of ``kets``."""
    if len(kets) == 0:
        raise ZeroSpan("empty list of kets")
    _check_dims(*(k.dim for k in kets))
    tol = get_tol(tol)
    if all(k.norm() <= tol for k in kets):
        raise ZeroSpan("all kets are numerically zero")
    rows = _orthonormal_basis(np.array([k.amplitudes for k in kets]))
    return projector_onto_rows(rows, kets[0].dim, tol=tol)


@overload
def tensor(a: Ket, b: Ket) -> Ket: ...
@overload
def tensor(a: Projector, b: Projector) -> Projector: ...
@overload
def tensor(a: Operator, b: Operator) -> Operator: ...


def tensor(a, b):
    """Kronecker product, row-major: index = i_a * dim_b + i_b."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Operator) and isinstance(b, Operator):
        m = np.kron(a.matrix, b.matrix)
        if isinstance(a, Projector) and isinstance(b, Projector):
            return Projector(m)
        return Operator(m)
    raise TypeError("tensor() needs two kets or two operators")


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere: polar angle ``theta``, azimuth ``phi`` (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi) or not (0.0 <= self.phi < 2 * math.pi):
            raise InvalidDirection(
                f"need 0 <= theta <= pi and 0 <= phi < 2pi, got ({self.theta}, {self.phi})"
            )

    @classmethod
    def wrapped(cls, theta: float, phi: float = 0.0) -> Direction:
        """Build from arbitrary angles, folding them into the canonical ranges."""
        theta = math.fmod(theta, 2 * math.pi)
        if theta < 0:
            theta += 2 * math.pi
        if theta > math.pi:
            theta, phi = 2 * math.pi - theta, phi + math.pi
        phi = math.fmod(phi, 2 * math.pi)
        if phi < 0:
            phi += 2 * math.pi
        if phi >= 2 * math.pi:
            phi = 0.0
        return cls(theta, phi)

    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


Z = Direction(0.0, 0.0)
X = Direction(math.pi / 2, 0.0)
Y = Direction(math.pi / 2, math.pi / 2)


def spin_ket(w: Direction, sign: int) -> Ket:
    """|w+> or |w-> for spin half along ``w``."""
    c, s = math.cos(w.theta / 2), math.sin(w.theta / 2)
    ph = complex(math.cos(w.phi), math.sin(w.phi))
    if sign == 1:
        return Ket([c, ph * s])
    if sign == -1:
        return Ket([s, -ph * c])
    raise ValueError("sign must be +1 or -1")


def spin_projector(w: Direction, sign: int) -> Projector:
    return ket_projector(spin_ket(w, sign))


def singlet() -> Ket:
    """(|z+ z-> - |z- z+>)/sqrt(2) on two spin-half particles."""
    r = 1 / math.sqrt(2)
    return Ket([0.0, r, -r, 0.0])


def check_unitary(u: Operator, tol: float | None = None) -> Operator:
    if not u.is_unitary(tol):
        raise NotUnitary(f"operator is not unitary within {get_tol(tol):g}")
    return u
