from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhist.errors import (
    DimensionMismatch,
    InvalidDirection,
    NotAProjector,
    NotUnitary,
    UnnormalizedState,
    ZeroSpan,
)
from qhist.hilbert import (
    X,
    Z,
    Direction,
    Ket,
    Operator,
    Projector,
    basis_ket,
    check_unitary,
    identity,
    inner_product,
    ket_projector,
    normalize,
    projector_from_span,
    rank,
    singlet,
    spin_ket,
    spin_projector,
    tensor,
)
from qhist.probability import born_probability
from qhist.sampling import random_ket, random_projector, random_unitary

from strategies import directions, rng, seeds, small_dims

R = 2 ** -0.5


def test_inner_products_of_spin_kets():
    zp, zm, xp = spin_ket(Z, 1), spin_ket(Z, -1), spin_ket(X, 1)
    assert inner_product(zp, zp) == pytest.approx(1)
    assert inner_product(zp, zm) == pytest.approx(0)
    assert inner_product(zp, xp) == pytest.approx(R)


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner_product(basis_ket(2, 0), basis_ket(3, 0))


def test_ket_is_read_only():
    k = Ket([1, 0])
    with pytest.raises(ValueError):
        k.amplitudes[0] = 2


def test_normalize_is_explicit():
    k = Ket([3, 4])
    assert not k.is_normalized()
    assert normalize(k).is_normalized()
    with pytest.raises(UnnormalizedState):
        ket_projector(k)


@pytest.mark.parametrize(
    "kets, expected",
    [
        ([spin_ket(Z, 1)], np.diag([1, 0])),
        ([spin_ket(Z, 1), spin_ket(Z, -1)], np.eye(2)),
        ([spin_ket(Z, 1), spin_ket(X, 1)], np.eye(2)),
    ],
)
def test_projector_from_span_examples(kets, expected):
    np.testing.assert_allclose(projector_from_span(kets).matrix, expected, atol=1e-12)


def test_projector_from_span_rejects_zero_and_mixed_dims():
    with pytest.raises(ZeroSpan):
        projector_from_span([Ket([0, 0]), Ket([1e-14, 0])])
    with pytest.raises(DimensionMismatch):
        projector_from_span([basis_ket(2, 0), basis_ket(3, 0)])


@settings(max_examples=60, deadline=None)
@given(seed=seeds, dim=small_dims, count=st.integers(1, 6))
def test_span_projector_is_valid(seed, dim, count):
    g = rng(seed)
    kets = [random_ket(dim, g) for _ in range(count)]
    # duplicate a vector so the span is rank deficient in some draws
    kets.append(Ket(2 * kets[0].amplitudes))
    p = projector_from_span(kets, tol=1e-10)
    Projector(p.matrix, tol=1e-10)
    assert p.rank == min(dim, count)
    for k in kets:
        np.testing.assert_allclose(p.matrix @ k.amplitudes, k.amplitudes, atol=1e-10)


def test_projector_validation():
    with pytest.raises(NotAProjector):
        Projector([[1, 1], [0, 0]])
    with pytest.raises(NotAProjector):
        Projector(np.eye(2) * 0.5)
    with pytest.raises(DimensionMismatch):
        Projector(np.ones((2, 3)))


def test_tensor_examples():
    e = tensor(spin_ket(Z, 1), spin_ket(Z, -1))
    # |z-> carries a -1 phase in this convention
    assert abs(inner_product(basis_ket(4, 1), e)) == pytest.approx(1)
    i4 = tensor(identity(2), identity(2))
    assert isinstance(i4, Projector)
    np.testing.assert_allclose(i4.matrix, np.eye(4))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, r1=st.integers(0, 2), r2=st.integers(0, 3))
def test_tensor_of_projectors_multiplies_rank(seed, r1, r2):
    g = rng(seed)
    p, q = random_projector(2, r1, g), random_projector(3, r2, g)
    pq = tensor(p, q)
    assert isinstance(pq, Projector)
    assert pq.rank == r1 * r2


def test_spin_ket_conventions():
    np.testing.assert_allclose(spin_ket(Direction(0.0), 1).amplitudes, [1, 0])
    np.testing.assert_allclose(spin_ket(Direction(math.pi / 2), 1).amplitudes, [R, R])
    assert abs(inner_product(spin_ket(X, 1), spin_ket(X, -1))) < 1e-15


@settings(max_examples=100, deadline=None)
@given(w=directions)
def test_spin_kets_orthonormal(w):
    plus, minus = spin_ket(w, 1), spin_ket(w, -1)
    assert plus.is_normalized(1e-12) and minus.is_normalized(1e-12)
    assert abs(inner_product(plus, minus)) <= 1e-12
    np.testing.assert_allclose(spin_projector(w, 1).matrix + spin_projector(w, -1).matrix,
                               np.eye(2), atol=1e-12)


def test_direction_ranges():
    with pytest.raises(InvalidDirection):
        Direction(-0.1)
    with pytest.raises(InvalidDirection):
        Direction(0.5, 2 * math.pi)
    w = Direction.wrapped(3 * math.pi / 2, 0.0)
    assert 0 <= w.theta <= math.pi and 0 <= w.phi < 2 * math.pi
    np.testing.assert_allclose(w.vector(), Direction(math.pi / 2, math.pi).vector(), atol=1e-12)


def test_singlet_examples():
    psi = singlet()
    assert psi.norm() == pytest.approx(1)
    both_up = tensor(spin_projector(Z, 1), spin_projector(Z, 1))
    assert born_probability(both_up, psi) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(w=directions)
def test_singlet_anticorrelation(w):
    psi = singlet()
    for sign in (1, -1):
        same = tensor(spin_projector(w, sign), spin_projector(w, sign))
        assert born_probability(same, psi) <= 1e-12


def test_unitary_check():
    check_unitary(random_unitary(3, rng(0)))
    with pytest.raises(NotUnitary):
        check_unitary(Operator([[1, 1], [0, 1]]))


def test_rank_uses_midgap_threshold():
    assert rank(np.diag([1.0, 0.6, 0.4, 0.0])) == 2
    assert rank(identity(3)) == 3
