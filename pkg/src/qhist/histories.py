"""Multi-time histories: chain vectors, consistency, history probabilities.

Time indices run 1..n on a grid t_0 < t_1 < ... < t_n; the initial state
lives at t_0 and ``Dynamics.unitaries[k - 1]`` carries t_{k-1} to t_k.
A family is consistent when its chain vectors are pairwise orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    FamilyTooLarge,
    InconsistentFamily,
    NotInFamily,
    TimeMismatch,
    UnnormalizedState,
    ZeroCondition,
)
from .framework import Framework, trivial_framework, two_projector_framework
from .hilbert import Ket, Operator, Projector, _check_dims, check_unitary, max_abs
from .probability import CONDITION_EPS, as_probability, born_probability
from .tolerance import get_tol

MAX_HISTORIES = 10**6
# the full Gram matrix is only materialized in reports up to this many histories
GRAM_REPORT_LIMIT = 4096


class Dynamics:
    """Unitaries between consecutive points of a time grid."""

    __slots__ = ("unitaries", "times")

    def __init__(self, unitaries: Sequence[Operator], times: Sequence[float] | None = None,
                 tol: float | None = None):
        unitaries = tuple(unitaries)
        if not unitaries:
            raise TimeMismatch("dynamics needs at least one step")
        _check_dims(*(u.dim for u in unitaries))
        for u in unitaries:
            check_unitary(u, tol)
        if times is None:
            times = tuple(float(k) for k in range(len(unitaries) + 1))
        times = tuple(float(t) for t in times)
        if len(times) != len(unitaries) + 1:
            raise TimeMismatch(f"{len(unitaries)} steps need {len(unitaries) + 1} grid times")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise TimeMismatch("grid times must be strictly increasing")
        self.unitaries = unitaries
        self.times = times

    @classmethod
    def identity(cls, dim: int, steps: int) -> Dynamics:
        eye = Operator(np.eye(dim))
        return cls([eye] * steps)

    @property
    def steps(self) -> int:
        return len(self.unitaries)

    @property
    def dim(self) -> int:
        return self.unitaries[0].dim

    def propagator(self, start: int, stop: int) -> np.ndarray:
        """U(t_stop <- t_start) = U_stop ... U_{start+1}."""
        if not 0 <= start <= stop <= self.steps:
            raise TimeMismatch(f"no propagation from t_{start} to t_{stop} on {self.steps} steps")
        m = np.eye(self.dim, dtype=np.complex128)
        for u in self.unitaries[start:stop]:
            m = u.matrix @ m
        return m


@dataclass(frozen=True)
class History:
    """Initial state plus projectors at strictly increasing time indices (>= 1)."""

    psi0: Ket
    events: tuple[tuple[int, Projector], ...]

    def __post_init__(self):
        times = [t for t, _ in self.events]
        if any(t < 1 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise TimeMismatch(f"history times must be increasing indices >= 1, got {times}")
        _check_dims(self.psi0.dim, *(p.dim for _, p in self.events))


def chain_vector(h: History, dyn: Dynamics) -> Ket:
    """P_n U_n ... P_1 U_1 |psi0>; unlisted times contribute the identity.

    Propagation stops at the last listed time; later unitaries would not
    change the norm.
    """
    _check_dims(h.psi0.dim, dyn.dim)
    v = h.psi0.amplitudes
    now = 0
    for t, p in h.events:
        if t > dyn.steps:
            raise TimeMismatch(f"time index {t} beyond the {dyn.steps}-step grid")
        v = p.matrix @ (dyn.propagator(now, t) @ v)
        now = t
    return Ket(v)


class HistoryFamily:
    """All histories built from one framework per time index."""

    def __init__(self, psi0: Ket, dynamics: Dynamics,
                 frameworks: Sequence[Framework | None] | Mapping[int, Framework],
                 tol: float | None = None):
        if not psi0.is_normalized(tol):
            raise UnnormalizedState("initial state must be normalized")
        if isinstance(frameworks, Mapping):
            bad = [t for t in frameworks if not 1 <= t <= dynamics.steps]
            if bad:
                raise TimeMismatch(f"framework times {bad} outside 1..{dynamics.steps}")
            frameworks = [frameworks.get(t) for t in range(1, dynamics.steps + 1)]
        frameworks = list(frameworks)
        if len(frameworks) != dynamics.steps:
            raise TimeMismatch(f"{dynamics.steps} steps need {dynamics.steps} frameworks")
        _check_dims(psi0.dim, dynamics.dim)
        self.frameworks: tuple[Framework, ...] = tuple(
            trivial_framework(dynamics.dim) if f is None else f for f in frameworks
        )
        _check_dims(dynamics.dim, *(f.dim for f in self.frameworks))
        self.psi0 = psi0
        self.dynamics = dynamics
        self._reports: dict[float, ConsistencyReport] = {}

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.frameworks)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def history(self, *indices: int | str) -> History:
        """The history picking element ``indices[k]`` (index or name) at time k + 1."""
        if len(indices) != len(self.frameworks):
            raise TimeMismatch(f"need {len(self.frameworks)} indices, got {len(indices)}")
        events = []
        for t, (f, i) in enumerate(zip(self.frameworks, indices), start=1):
            events.append((t, f.elements[i if isinstance(i, int) else f.index(i)]))
        return History(self.psi0, tuple(events))

    def labels(self, indices: Sequence[int]) -> tuple[str, ...]:
        return tuple(f.names[i] for f, i in zip(self.frameworks, indices))


@dataclass
class ConsistencyReport:
    consistent: bool
    tol: float
    n_histories: int
    max_offdiagonal: float
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    probabilities: np.ndarray = field(repr=False)
    gram: np.ndarray | None = field(default=None, repr=False)


def _chain_vectors(fam: HistoryFamily, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero chain vectors and their flat history indices.

    Prefixes whose norm drops to ``tol`` or below are pruned: every extension
    has an inner product of at most ``tol`` with any other chain vector.
    """
    kets = fam.psi0.amplitudes[None, :].copy()
    flat = np.zeros(1, dtype=np.int64)
    for u, f in zip(fam.dynamics.unitaries, fam.frameworks):
        ops = np.stack([p.matrix @ u.matrix for p in f.elements])
        kets = _kernels.expand(kets, ops)
        flat = (flat[:, None] * len(f) + np.arange(len(f))[None, :]).ravel()
        keep = np.linalg.norm(kets, axis=1) > tol
        kets, flat = kets[keep], flat[keep]
    return kets, flat


def consistency_check(fam: HistoryFamily, tol: float | None = None) -> ConsistencyReport:
    """Test pairwise orthogonality of all chain vectors in ``fam``."""
    tol = get_tol(tol)
    if tol in fam._reports:
        return fam._reports[tol]
    n = fam.size
    if n > MAX_HISTORIES:
        raise FamilyTooLarge(f"{n} histories exceeds the cap of {MAX_HISTORIES}")
    kets, flat = _chain_vectors(fam, tol)
    worst, i, j = _kernels.max_offdiag(kets)
    probs = np.zeros(n)
    probs[flat] = np.sum(np.abs(kets) ** 2, axis=1)
    gram = None
    if n <= GRAM_REPORT_LIMIT:
        gram = np.zeros((n, n), dtype=np.complex128)
        gram[np.ix_(flat, flat)] = kets.conj() @ kets.T
    pair = None
    if i >= 0:
        a = tuple(int(x) for x in np.unravel_index(flat[i], fam.shape))
        b = tuple(int(x) for x in np.unravel_index(flat[j], fam.shape))
        pair = (a, b)
    report = ConsistencyReport(
        consistent=worst <= tol,
        tol=tol,
        n_histories=n,
        max_offdiagonal=float(worst),
        worst_pair=pair,
        probabilities=probs,
        gram=gram,
    )
    fam._reports[tol] = report
    return report


def _require_consistent(fam: HistoryFamily, tol: float | None) -> ConsistencyReport:
    report = consistency_check(fam, tol)
    if not report.consistent:
        a, b = report.worst_pair
        raise InconsistentFamily(
            f"chain vectors of {fam.labels(a)} and {fam.labels(b)} overlap by "
            f"{report.max_offdiagonal:.3g} (> {report.tol:g})"
        )
    return report


def history_probability(h: History | Sequence[int], fam: HistoryFamily,
                        tol: float | None = None) -> float:
    """||chain vector||^2 for a history of a consistent family.

    ``h`` may be an index tuple, or a History whose projector at each listed
    time is an event (possibly coarse-grained) of that time's framework.
    """
    report = _require_consistent(fam, tol)
    if not isinstance(h, History):
        idx = tuple(int(i) for i in h)
        if len(idx) != len(fam.frameworks) or any(
            not 0 <= i < n for i, n in zip(idx, fam.shape)
        ):
            raise NotInFamily(f"index tuple {idx} not in a family of shape {fam.shape}")
        return as_probability(report.probabilities[np.ravel_multi_index(idx, fam.shape)])
    tol = get_tol(tol)
    if h.psi0.dim != fam.psi0.dim or max_abs(h.psi0.amplitudes - fam.psi0.amplitudes) > tol:
        raise NotInFamily("history starts from a different initial state")
    for t, p in h.events:
        if not 1 <= t <= len(fam.frameworks):
            raise TimeMismatch(f"time index {t} outside 1..{len(fam.frameworks)}")
        if fam.frameworks[t - 1].event_of(p, tol) is None:
            raise NotInFamily(f"projector at time {t} is not an event of that framework")
    return as_probability(chain_vector(h, fam.dynamics).norm() ** 2)


def single_time_probability(p: Projector, t: int, psi0: Ket, dyn: Dynamics,
                            tol: float | None = None) -> float:
    """Born probability of ``p`` at time index ``t``."""
    state = Ket(dyn.propagator(0, t) @ psi0.amplitudes)
    return born_probability(p, state, tol)


def _selector(p: Projector, tol: float) -> tuple[Framework, int | None]:
    # the coarsest framework containing p, and p's index in it (None when p = 0)
    eye = np.eye(p.dim)
    if max_abs(p.matrix - eye) <= tol:
        return trivial_framework(p.dim), 0
    if max_abs(p.matrix) <= tol:
        return trivial_framework(p.dim), None
    return two_projector_framework(p, tol=tol), 0


def two_time_family(psi0: Ket, dyn: Dynamics, first: tuple[int, Projector],
                    second: tuple[int, Projector],
                    intermediate: Mapping[int, Framework] | None = None,
                    tol: float | None = None) -> tuple[HistoryFamily, int | None, int | None]:
    """Family with {P, I-P} at each of the two times plus optional extra frameworks.

    Returns the family and the indices selecting each projector in its framework.
    """
    tol = get_tol(tol)
    (ta, pa), (tb, pb) = first, second
    if ta == tb:
        raise TimeMismatch("the two events must be at distinct times")
    if not (1 <= ta <= dyn.steps and 1 <= tb <= dyn.steps):
        raise TimeMismatch(f"times {ta}, {tb} outside 1..{dyn.steps}")
    intermediate = dict(intermediate or {})
    if ta in intermediate or tb in intermediate:
        raise TimeMismatch("intermediate frameworks may not sit at the event times")
    fa, ia = _selector(pa, tol)
    fb, ib = _selector(pb, tol)
    frameworks = {**intermediate, ta: fa, tb: fb}
    return HistoryFamily(psi0, dyn, frameworks, tol=tol), ia, ib


def two_time_joint(psi0: Ket, dyn: Dynamics, first: tuple[int, Projector],
                   second: tuple[int, Projector],
                   intermediate: Mapping[int, Framework] | None = None,
                   tol: float | None = None) -> float:
    """Pr(P_a at t_a; P_b at t_b), marginal over any intermediate framework.

    Refused with InconsistentFamily unless the underlying family is consistent.
    """
    fam, ia, ib = two_time_family(psi0, dyn, first, second, intermediate, tol)
    report = _require_consistent(fam, tol)
    if ia is None or ib is None:
        return 0.0
    probs = report.probabilities.reshape(fam.shape)
    index: list[int | slice] = [slice(None)] * len(fam.shape)
    index[first[0] - 1] = ia
    index[second[0] - 1] = ib
    return as_probability(float(np.sum(probs[tuple(index)])))


def two_time_conditional(psi0: Ket, dyn: Dynamics, target: tuple[int, Projector],
                         given: tuple[int, Projector],
                         intermediate: Mapping[int, Framework] | None = None,
                         tol: float | None = None, eps: float = CONDITION_EPS) -> float:
    """Pr(target | given) within the two-time family; either may be the earlier event."""
    joint = two_time_joint(psi0, dyn, given, target, intermediate, tol)
    t, p = given
    pg = single_time_probability(p, t, psi0, dyn, tol)
    if pg <= eps:
        raise ZeroCondition(f"conditioning event has probability {pg:.3g}")
    return as_probability(joint / pg)


__all__ = [
    "ConsistencyReport",
    "Dynamics",
    "History",
    "HistoryFamily",
    "chain_vector",
    "consistency_check",
    "history_probability",
    "single_time_probability",
    "two_time_conditional",
    "two_time_family",
    "two_time_joint",
]
