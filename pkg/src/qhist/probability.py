"""Born-rule probabilities, partial traces and density matrices."""

from __future__ import annotations

from typing import Iterable, Literal

import numpy as np

from .errors import (
    BadFactorization,
    DimensionMismatch,
    IncompatibleProjectors,
    InvalidDensityMatrix,
    InvalidEnsemble,
    NumericalInstability,
    UnnormalizedState,
    ZeroCondition,
)
from .hilbert import Ket, Operator, Projector, _check_dims, max_abs
from .logic import commutator_norm
from .tolerance import get_tol

# raw values outside [-SLACK, 1 + SLACK] indicate a bug, not rounding
PROBABILITY_SLACK = 1e-9
# conditioning events with probability at or below this are refused
CONDITION_EPS = 1e-12


class DensityMatrix(Operator):
    """Hermitian, unit-trace, positive semidefinite operator."""

    __slots__ = ()

    def __init__(self, matrix, tol: float | None = None):
        super().__init__(matrix)
        tol = get_tol(tol)
        m = self.matrix
        if max_abs(m - m.conj().T) > tol:
            raise InvalidDensityMatrix("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > tol:
            raise InvalidDensityMatrix(f"trace is {tr.real:.12g}, not 1")
        low = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if low < -tol:
            raise InvalidDensityMatrix(f"negative eigenvalue {low:.3g}")

    @classmethod
    def pure(cls, psi: Ket, tol: float | None = None) -> DensityMatrix:
        _require_normalized(psi, tol)
        v = psi.amplitudes
        return cls(np.outer(v, v.conj()), tol=tol)


def _require_normalized(psi: Ket, tol: float | None) -> None:
    if not psi.is_normalized(tol):
        raise UnnormalizedState(f"state has <psi|psi> = {psi.norm() ** 2:.12g}")


def as_probability(value: float) -> float:
    """Clamp a computed probability to [0, 1], refusing gross excursions."""
    value = float(value)
    if not (-PROBABILITY_SLACK <= value <= 1.0 + PROBABILITY_SLACK):
        raise NumericalInstability(f"probability {value!r} is outside [0, 1]")
    return min(1.0, max(0.0, value))


def born_probability(e: Projector, psi: Ket, tol: float | None = None) -> float:
    """<psi|E|psi> for a normalized state."""
    _check_dims(e.dim, psi.dim)
    _require_normalized(psi, tol)
    v = psi.amplitudes
    return as_probability(np.vdot(v, e.matrix @ v).real)


def _require_compatible(a: Projector, b: Projector, tol: float | None) -> None:
    _check_dims(a.dim, b.dim)
    c = commutator_norm(a, b)
    if c > get_tol(tol):
        raise IncompatibleProjectors(f"projectors do not commute (||AB - BA||_max = {c:.3g})")


def joint_probability(a: Projector, b: Projector, psi: Ket, tol: float | None = None) -> float:
    """Pr(A, B) = <psi|AB|psi>; defined only when A and B commute."""
    _require_compatible(a, b, tol)
    _check_dims(a.dim, psi.dim)
    _require_normalized(psi, tol)
    v = psi.amplitudes
    return as_probability(np.vdot(v, a.matrix @ (b.matrix @ v)).real)


def conditional_probability(b: Projector, a: Projector, psi: Ket, tol: float | None = None,
                            eps: float = CONDITION_EPS) -> float:
    """Pr(B | A) = Pr(A, B) / Pr(A)."""
    joint = joint_probability(a, b, psi, tol)
    pa = born_probability(a, psi, tol)
    if pa <= eps:
        raise ZeroCondition(f"Pr(A) = {pa:.3g} is not above {eps:g}")
    return as_probability(joint / pa)


def partial_trace(state: Ket | Operator, keep: Literal[0, 1, "a", "b"],
                  dims: tuple[int, int], tol: float | None = None) -> DensityMatrix:
    """Reduced density matrix of one factor of a bipartite space.

    Kets are first turned into [psi]. Factor layout is row-major, so basis
    index ``i * dims[1] + j`` is ``|i>_a |j>_b``.
    """
    da, db = dims
    if da < 1 or db < 1:
        raise BadFactorization(f"bad factor dimensions {dims}")
    if isinstance(state, Ket):
        if state.dim != da * db:
            raise DimensionMismatch(f"state dimension {state.dim} != {da} x {db}")
        rho = DensityMatrix.pure(state, tol).matrix
    else:
        if state.dim != da * db:
            raise DimensionMismatch(f"operator dimension {state.dim} != {da} x {db}")
        rho = DensityMatrix(state.matrix, tol).matrix
    t = rho.reshape(da, db, da, db)
    if keep in (0, "a"):
        reduced = np.einsum("ijkj->ik", t)
    elif keep in (1, "b"):
        reduced = np.einsum("jijk->ik", t)
    else:
        raise BadFactorization(f"keep must be 'a' or 'b', got {keep!r}")
    return DensityMatrix(reduced, tol)


def dm_probability(rho: Operator, p: Projector) -> float:
    """Tr(rho P)."""
    _check_dims(rho.dim, p.dim)
    return as_probability(np.trace(rho.matrix @ p.matrix).real)


def ensemble_to_density(ensemble: Iterable[tuple[float, Ket]],
                        tol: float | None = None) -> DensityMatrix:
    """sum_j p_j [psi_j] for weights p_j and normalized (nonorthogonal) kets."""
    members = list(ensemble)
    tol = get_tol(tol)
    if not members:
        raise InvalidEnsemble("empty ensemble")
    weights = np.array([float(w) for w, _ in members])
    if np.any(weights < -tol) or abs(weights.sum() - 1.0) > tol:
        raise InvalidEnsemble(f"weights must be nonnegative and sum to 1, got {weights.tolist()}")
    kets = [k for _, k in members]
    try:
        _check_dims(*(k.dim for k in kets))
    except DimensionMismatch as exc:
        raise InvalidEnsemble(str(exc)) from exc
    if not all(k.is_normalized(tol) for k in kets):
        raise InvalidEnsemble("ensemble kets must be normalized")
    dim = kets[0].dim
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for w, k in members:
        rho += w * np.outer(k.amplitudes, k.amplitudes.conj())
    return DensityMatrix(rho, tol)
