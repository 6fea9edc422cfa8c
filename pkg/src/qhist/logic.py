"""Subspace lattice operations on projectors (negation, meet, join) and
the compatibility / exclusivity / distributivity tests built on them."""

from __future__ import annotations

import numpy as np

from .hilbert import Projector, _check_dims, max_abs, projector_onto_rows
from .tolerance import get_tol

# eigenvalues of 2I - P - Q below this count as zero when intersecting ranges
MEET_EIGEN_THRESHOLD = 1e-8


def negation(p: Projector) -> Projector:
    """I - P, the projector onto the orthogonal complement."""
    return Projector(np.eye(p.dim) - p.matrix)


def meet(p: Projector, q: Projector) -> Projector:
    """Projector onto range(P) ∩ range(Q).

    A vector lies in both ranges iff Pv = v and Qv = v, i.e. iff it is in the
    kernel of the positive semidefinite operator 2I - P - Q.
    """
    _check_dims(p.dim, q.dim)
    m = 2 * np.eye(p.dim) - p.matrix - q.matrix
    eig, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    kernel = vecs[:, eig < MEET_EIGEN_THRESHOLD]
    return projector_onto_rows(kernel.T, p.dim)


def join(p: Projector, q: Projector) -> Projector:
    """Projector onto the span of range(P) ∪ range(Q), via De Morgan."""
    _check_dims(p.dim, q.dim)
    return negation(meet(negation(p), negation(q)))


def commutator_norm(a, b) -> float:
    """Max-entry norm of AB - BA for two operators."""
    _check_dims(a.dim, b.dim)
    return max_abs(a.matrix @ b.matrix - b.matrix @ a.matrix)


def compatible(p: Projector, q: Projector, tol: float | None = None) -> bool:
    return commutator_norm(p, q) <= get_tol(tol)


def mutually_exclusive(p: Projector, q: Projector, tol: float | None = None) -> bool:
    _check_dims(p.dim, q.dim)
    return max_abs(p.matrix @ q.matrix) <= get_tol(tol)


def distributive_identity_holds(p: Projector, q: Projector, r: Projector,
                                tol: float | None = None) -> bool:
    """Whether P ∧ (Q ∨ R) == (P ∧ Q) ∨ (P ∧ R) entrywise within ``tol``."""
    _check_dims(p.dim, q.dim, r.dim)
    lhs = meet(p, join(q, r))
    rhs = join(meet(p, q), meet(p, r))
    return max_abs(lhs.matrix - rhs.matrix) <= get_tol(tol)
