from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhist.errors import (
    FamilyTooLarge,
    InconsistentFamily,
    NotInFamily,
    NotUnitary,
    TimeMismatch,
    UnnormalizedState,
    ZeroCondition,
)
from qhist.framework import Framework, trivial_framework, two_projector_framework
from qhist.hilbert import X, Y, Z, Ket, Operator, Projector, identity, singlet, spin_ket, spin_projector, tensor
from qhist.histories import (
    Dynamics,
    History,
    HistoryFamily,
    chain_vector,
    consistency_check,
    history_probability,
    single_time_probability,
    two_time_conditional,
    two_time_joint,
)
from qhist.logic import negation
from qhist.sampling import random_direction, random_framework, random_ket, random_unitary
from qhist.scenarios import hardy_instance

from strategies import rng, seeds

SZ = Framework([spin_projector(Z, 1), spin_projector(Z, -1)], ["z+", "z-"])
SX = Framework([spin_projector(X, 1), spin_projector(X, -1)], ["x+", "x-"])
I2 = identity(2)
ZA_PLUS = tensor(spin_projector(Z, 1), I2)
ZA_MINUS = tensor(spin_projector(Z, -1), I2)


def test_dynamics_validation():
    with pytest.raises(TimeMismatch):
        Dynamics([])
    with pytest.raises(NotUnitary):
        Dynamics([Operator([[1, 1], [0, 1]])])
    with pytest.raises(TimeMismatch):
        Dynamics([I2, I2], times=[0.0, 1.0])
    with pytest.raises(TimeMismatch):
        Dynamics([I2, I2], times=[0.0, 2.0, 1.0])
    dyn = Dynamics([I2, I2], times=[0.0, 0.5, 3.0])
    assert dyn.steps == 2 and dyn.times == (0.0, 0.5, 3.0)


def test_propagator_order():
    g = rng(0)
    u1, u2 = random_unitary(2, g), random_unitary(2, g)
    dyn = Dynamics([u1, u2])
    np.testing.assert_allclose(dyn.propagator(0, 2), u2.matrix @ u1.matrix, atol=1e-14)
    np.testing.assert_allclose(dyn.propagator(1, 1), np.eye(2))
    with pytest.raises(TimeMismatch):
        dyn.propagator(2, 1)


def test_chain_vector_examples():
    g = rng(1)
    u = random_unitary(3, g)
    psi = random_ket(3, g)
    k = chain_vector(History(psi, ((1, identity(3)),)), Dynamics([u]))
    np.testing.assert_allclose(k.amplitudes, u.matrix @ psi.amplitudes, atol=1e-14)
    assert k.norm() == pytest.approx(1)
    dyn = Dynamics.identity(4, 2)
    half = chain_vector(History(singlet(), ((1, ZA_PLUS),)), dyn)
    assert half.norm() ** 2 == pytest.approx(0.5)
    zero = chain_vector(History(singlet(), ((1, ZA_PLUS), (2, ZA_MINUS))), dyn)
    assert zero.norm() == pytest.approx(0, abs=1e-15)


def test_history_validation():
    with pytest.raises(TimeMismatch):
        History(spin_ket(Z, 1), ((2, I2), (1, I2)))
    with pytest.raises(TimeMismatch):
        History(spin_ket(Z, 1), ((0, I2),))
    with pytest.raises(TimeMismatch):
        chain_vector(History(spin_ket(Z, 1), ((3, I2),)), Dynamics.identity(2, 2))


def test_family_validation():
    with pytest.raises(UnnormalizedState):
        HistoryFamily(Ket([1, 1]), Dynamics.identity(2, 1), [SZ])
    with pytest.raises(TimeMismatch):
        HistoryFamily(spin_ket(Z, 1), Dynamics.identity(2, 2), [SZ])
    with pytest.raises(TimeMismatch):
        HistoryFamily(spin_ket(Z, 1), Dynamics.identity(2, 2), {3: SZ})
    fam = HistoryFamily(spin_ket(Z, 1), Dynamics.identity(2, 3), {2: SX})
    assert fam.shape == (1, 2, 1)
    assert fam.labels((0, 1, 0)) == ("I", "x-", "I")


def test_consistency_examples():
    dyn = Dynamics.identity(2, 2)
    assert consistency_check(HistoryFamily(spin_ket(Y, 1), Dynamics.identity(2, 1), [SZ])).consistent
    good = consistency_check(HistoryFamily(spin_ket(Z, 1), dyn, [SZ, SX]))
    bad = consistency_check(HistoryFamily(spin_ket(Y, 1), dyn, [SZ, SX]))
    assert good.consistent and good.gram is not None
    assert not bad.consistent and bad.max_offdiagonal == pytest.approx(0.25)
    assert bad.worst_pair is not None


def test_family_size_guard(monkeypatch):
    import qhist.histories as h
    monkeypatch.setattr(h, "MAX_HISTORIES", 7)
    fam = HistoryFamily(spin_ket(Z, 1), Dynamics.identity(2, 3), [SZ, SX, SZ])
    with pytest.raises(FamilyTooLarge):
        consistency_check(fam)


def test_history_probability_examples():
    dyn = Dynamics.identity(2, 2)
    fam = HistoryFamily(spin_ket(Z, 1), dyn, [None, SX])
    assert history_probability(History(spin_ket(Z, 1), ((1, I2),)), fam) == pytest.approx(1)
    inst = hardy_instance()
    p = inst.projectors
    a_not_b = Projector(p["A"].matrix @ negation(p["B"]).matrix)
    hfam = HistoryFamily(inst.psi, Dynamics.identity(4, 1), [two_projector_framework(a_not_b)])
    assert history_probability((0,), hfam) <= 1e-10
    sfam = HistoryFamily(singlet(), Dynamics.identity(4, 1), [two_projector_framework(ZA_PLUS)])
    assert history_probability((0,), sfam) == pytest.approx(0.5)


def test_history_probability_errors():
    dyn = Dynamics.identity(2, 2)
    with pytest.raises(InconsistentFamily):
        history_probability((0, 0), HistoryFamily(spin_ket(Y, 1), dyn, [SZ, SX]))
    fam = HistoryFamily(spin_ket(Z, 1), dyn, [SZ, SX])
    with pytest.raises(NotInFamily):
        history_probability((0, 2), fam)
    with pytest.raises(NotInFamily):
        history_probability(History(spin_ket(Z, 1), ((1, spin_projector(X, 1)),)), fam)
    with pytest.raises(NotInFamily):
        history_probability(History(spin_ket(Z, -1), ((1, I2),)), fam)


def test_two_time_examples():
    dyn = Dynamics.identity(4, 3)
    for v in (Z, X, random_direction(rng(2))):
        mid = {2: Framework([tensor(I2, spin_projector(v, 1)), tensor(I2, spin_projector(v, -1))])}
        assert two_time_joint(singlet(), dyn, (1, ZA_MINUS), (3, ZA_PLUS), mid) <= 1e-12
        assert two_time_joint(singlet(), dyn, (1, ZA_PLUS), (3, ZA_MINUS), mid) <= 1e-12
        assert two_time_conditional(singlet(), dyn, (3, ZA_PLUS), (1, ZA_PLUS), mid) == pytest.approx(1)
    psi = random_ket(2, rng(3))
    p = spin_projector(X, 1)
    from qhist.probability import born_probability
    assert two_time_joint(psi, Dynamics.identity(2, 3), (1, p), (3, p)) == pytest.approx(
        born_probability(p, psi))


def test_two_time_conditional_either_order():
    dyn = Dynamics.identity(2, 2)
    zp = spin_projector(Z, 1)
    forward = two_time_conditional(spin_ket(X, 1), dyn, (2, zp), (1, zp))
    backward = two_time_conditional(spin_ket(X, 1), dyn, (1, zp), (2, zp))
    assert forward == pytest.approx(1) and backward == pytest.approx(1)


def test_two_time_errors():
    dyn = Dynamics.identity(2, 3)
    zp = spin_projector(Z, 1)
    with pytest.raises(TimeMismatch):
        two_time_joint(spin_ket(Z, 1), dyn, (1, zp), (1, zp))
    with pytest.raises(TimeMismatch):
        two_time_joint(spin_ket(Z, 1), dyn, (1, zp), (2, zp), {2: SX})
    with pytest.raises(InconsistentFamily):
        two_time_joint(spin_ket(Y, 1), dyn, (1, zp), (3, zp), {2: SX})
    with pytest.raises(ZeroCondition):
        two_time_conditional(spin_ket(Z, 1), dyn, (3, zp), (1, spin_projector(Z, -1)))


def test_single_time_probability_uses_dynamics():
    flip = Operator([[0, 1], [1, 0]])
    dyn = Dynamics([flip, flip])
    zp = spin_projector(Z, 1)
    assert single_time_probability(zp, 1, spin_ket(Z, 1), dyn) == pytest.approx(0)
    assert single_time_probability(zp, 2, spin_ket(Z, 1), dyn) == pytest.approx(1)


def _random_family(seed, dim, steps):
    g = rng(seed)
    dyn = Dynamics([random_unitary(dim, g) for _ in range(steps)])
    frameworks = [random_framework(dim, g) for _ in range(steps)]
    return HistoryFamily(random_ket(dim, g), dyn, frameworks), g


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 3), steps=st.integers(1, 3))
def test_consistent_families_sum_to_one(seed, dim, steps):
    fam, _ = _random_family(seed, dim, steps)
    report = consistency_check(fam)
    # Gram diagonal carries the weights; its total is always 1 for a decomposition
    assert abs(report.probabilities.sum() - 1.0) <= 1e-10 or not report.consistent
    if report.consistent:
        total = sum(history_probability(idx, fam) for idx in np.ndindex(*fam.shape))
        assert abs(total - 1.0) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 4), steps=st.integers(1, 3))
def test_chain_vectors_match_direct_products(seed, dim, steps):
    fam, _ = _random_family(seed, dim, steps)
    report = consistency_check(fam)
    for flat, idx in enumerate(np.ndindex(*fam.shape)):
        k = chain_vector(fam.history(*idx), fam.dynamics).amplitudes
        assert report.probabilities[flat] == pytest.approx(np.vdot(k, k).real, abs=1e-12)
    if report.gram is not None:
        kets = [chain_vector(fam.history(*idx), fam.dynamics).amplitudes
                for idx in np.ndindex(*fam.shape)]
        direct = np.array([[np.vdot(a, b) for b in kets] for a in kets])
        keep = np.abs(np.diag(direct)) > 1e-20
        np.testing.assert_allclose(report.gram[np.ix_(keep, keep)], direct[np.ix_(keep, keep)],
                                   atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 4))
def test_coarse_graining_adds(seed, dim):
    g = rng(seed)
    dyn = Dynamics.identity(dim, 2)
    f = random_framework(dim, g, blocks=dim)
    fam = HistoryFamily(random_ket(dim, g), dyn, [f, f])   # repeated framework: always consistent
    assert consistency_check(fam).consistent
    merged = History(fam.psi0, ((1, f.event(0, 1).projector), (2, f.elements[1])))
    parts = history_probability((0, 1), fam) + history_probability((1, 1), fam)
    assert history_probability(merged, fam) == pytest.approx(parts, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 4))
def test_trivial_extension_keeps_chain_vector(seed, dim):
    g = rng(seed)
    u = random_unitary(dim, g)
    f = random_framework(dim, g)
    psi = random_ket(dim, g)
    h1 = History(psi, ((1, f.elements[0]),))
    h2 = History(psi, ((1, f.elements[0]), (2, identity(dim))))
    k1 = chain_vector(h1, Dynamics([u]))
    k2 = chain_vector(h2, Dynamics([u, Operator(np.eye(dim))]))
    np.testing.assert_allclose(k1.amplitudes, k2.amplitudes, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_locality_theorem(seed):
    g = rng(seed)
    w, v = random_direction(g), random_direction(g)
    ub = np.kron(np.eye(2), random_unitary(2, g).matrix)
    dyn = Dynamics([Operator(ub)] * 3)
    ap, am = tensor(spin_projector(w, 1), I2), tensor(spin_projector(w, -1), I2)
    mid = {2: Framework([tensor(I2, spin_projector(v, 1)), tensor(I2, spin_projector(v, -1))])}
    assert two_time_joint(singlet(), dyn, (1, am), (3, ap), mid) <= 1e-12
    assert two_time_joint(singlet(), dyn, (1, ap), (3, am), mid) <= 1e-12
    assert abs(two_time_conditional(singlet(), dyn, (3, ap), (1, ap), mid) - 1) <= 1e-12
    assert abs(two_time_conditional(singlet(), dyn, (3, am), (1, am), mid) - 1) <= 1e-12
