"""Frameworks: decompositions of the identity and their event algebras.

A framework is the only context in which propositions can be combined.
``conjoin_events`` is the sole route to "P AND Q" and refuses pairs whose
frameworks have no common refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateProjector,
    DimensionMismatch,
    IncompatibleFrameworks,
    MeaninglessCombination,
    NotADecomposition,
    NotOrthogonal,
    ZeroElement,
)
from .hilbert import Projector, _check_dims, max_abs, rank
from .logic import commutator_norm, negation
from .tolerance import get_tol


class Framework:
    """Named, pairwise orthogonal, nonzero projectors summing to the identity."""

    __slots__ = ("elements", "names")

    def __init__(self, elements: Sequence[Projector], names: Sequence[str] | None = None,
                 tol: float | None = None):
        elements = tuple(elements)
        if not elements:
            raise NotADecomposition("a framework needs at least one projector")
        _check_dims(*(p.dim for p in elements))
        if names is None:
            names = [f"e{i}" for i in range(len(elements))]
        names = tuple(str(n) for n in names)
        if len(names) != len(elements):
            raise ValueError("one name per element required")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate element names: {names}")
        tol = get_tol(tol)
        dim = elements[0].dim
        for name, p in zip(names, elements):
            if max_abs(p.matrix) <= tol:
                raise ZeroElement(f"element {name!r} is the zero projector")
        total = sum(p.matrix for p in elements)
        defect = max_abs(total - np.eye(dim))
        if defect > tol:
            raise NotADecomposition(f"elements sum to I only within {defect:.3g}")
        for (i, p), (j, q) in combinations(enumerate(elements), 2):
            overlap = max_abs(p.matrix @ q.matrix)
            if overlap > tol:
                raise NotOrthogonal(f"elements {names[i]!r} and {names[j]!r} overlap ({overlap:.3g})")
        self.elements = elements
        self.names = names

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"Framework(dim={self.dim}, names={list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def element(self, name: str) -> Projector:
        return self.elements[self.index(name)]

    def event(self, *members: int | str) -> Event:
        idx = frozenset(m if isinstance(m, int) else self.index(m) for m in members)
        return Event(self, idx)

    def sure_event(self) -> Event:
        return Event(self, frozenset(range(len(self))))

    def event_of(self, p: Projector, tol: float | None = None) -> Event | None:
        """The event whose projector equals ``p``, or None if ``p`` is not in the algebra."""
        _check_dims(self.dim, p.dim)
        tol = get_tol(tol)
        members = frozenset(
            i for i, e in enumerate(self.elements)
            if abs(np.trace(e.matrix @ p.matrix).real - rank(e)) <= 0.5
        )
        ev = Event(self, members)
        return ev if max_abs(ev.projector.matrix - p.matrix) <= tol else None


@dataclass(frozen=True)
class Event:
    """Subset of a framework's elements; its projector is their sum."""

    framework: Framework
    members: frozenset[int]

    def __post_init__(self):
        if any(not 0 <= i < len(self.framework) for i in self.members):
            raise IndexError("event member out of range")

    @property
    def projector(self) -> Projector:
        f = self.framework
        m = np.zeros((f.dim, f.dim), dtype=np.complex128)
        for i in sorted(self.members):
            m = m + f.elements[i].matrix
        return Projector(m)

    @property
    def label(self) -> str:
        names = [self.framework.names[i] for i in sorted(self.members)]
        if not names:
            return "0"
        return names[0] if len(names) == 1 else "(" + " + ".join(names) + ")"


def make_framework(projectors: Sequence[Projector], names: Sequence[str] | None = None,
                   tol: float | None = None) -> Framework:
    return Framework(projectors, names, tol=tol)


def trivial_framework(dim: int) -> Framework:
    return Framework([Projector(np.eye(dim))], ["I"])


def two_projector_framework(p: Projector, name: str = "P", tol: float | None = None) -> Framework:
    """The coarsest framework containing ``p``: {P, I - P}."""
    tol = get_tol(tol)
    if max_abs(p.matrix) <= tol or max_abs(p.matrix - np.eye(p.dim)) <= tol:
        raise DegenerateProjector("P must be neither 0 nor I")
    return Framework([p, negation(p)], [name, "~" + name], tol=tol)


def frameworks_compatible(f1: Framework, f2: Framework, tol: float | None = None) -> bool:
    _check_dims(f1.dim, f2.dim)
    tol = get_tol(tol)
    return all(commutator_norm(p, q) <= tol for p in f1 for q in f2)


def _joined_name(a: str, b: str) -> str:
    return a if a == b else f"{a}&{b}"


def common_refinement(f1: Framework, f2: Framework, *more: Framework,
                      tol: float | None = None) -> Framework:
    """Coarsest framework refining every argument: all nonzero products.

    Raises IncompatibleFrameworks if any pair of inputs fails to commute;
    no joint sample space exists in that case.
    """
    frameworks = (f1, f2, *more)
    _check_dims(*(f.dim for f in frameworks))
    tol = get_tol(tol)
    for (i, a), (j, b) in combinations(enumerate(frameworks), 2):
        if not frameworks_compatible(a, b, tol):
            raise IncompatibleFrameworks(
                f"frameworks #{i} {list(a.names)} and #{j} {list(b.names)} do not commute"
            )
    elements, names = list(f1.elements), list(f1.names)
    for f in frameworks[1:]:
        next_elements, next_names = [], []
        for p, pn in zip(elements, names):
            for q, qn in zip(f.elements, f.names):
                prod = p.matrix @ q.matrix
                if rank(prod) == 0:
                    continue
                next_elements.append(Projector((prod + prod.conj().T) / 2, tol=tol))
                next_names.append(_joined_name(pn, qn))
        elements, names = next_elements, _dedupe(next_names)
    return Framework(elements, names, tol=tol)


def _dedupe(names: Iterable[str]) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for n in names:
        if n in seen:
            seen[n] += 1
            out.append(f"{n}#{seen[n]}")
        else:
            seen[n] = 0
            out.append(n)
    return out


def conjoin_events(e1: Event, e2: Event, tol: float | None = None) -> Event:
    """The event "e1 AND e2" inside the common refinement of their frameworks."""
    if e1.framework.dim != e2.framework.dim:
        raise DimensionMismatch(f"dimension mismatch: {e1.framework.dim}, {e2.framework.dim}")
    tol = get_tol(tol)
    if e1.framework is e2.framework:
        return Event(e1.framework, e1.members & e2.members)
    try:
        refined = common_refinement(e1.framework, e2.framework, tol=tol)
    except IncompatibleFrameworks as exc:
        raise MeaninglessCombination(
            f"{e1.label} AND {e2.label} is undefined: {exc}"
        ) from exc
    both = e1.projector.matrix @ e2.projector.matrix
    event = refined.event_of(Projector((both + both.conj().T) / 2, tol=tol), tol=tol)
    if event is None:  # cannot happen for compatible frameworks
        raise MeaninglessCombination("product is not an event of the common refinement")
    return event
