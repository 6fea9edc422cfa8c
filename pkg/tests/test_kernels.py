from __future__ import annotations

import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhist import _chain_py, _kernels

from strategies import rng, seeds

try:
    from qhist import _chain
except ImportError:  # extension not built
    _chain = None

needs_ext = pytest.mark.skipif(_chain is None, reason="compiled extension not built")


def _random(g, n, d, m=None):
    kets = g.normal(size=(n, d)) + 1j * g.normal(size=(n, d))
    if m is None:
        return kets
    ops = g.normal(size=(m, d, d)) + 1j * g.normal(size=(m, d, d))
    return kets, ops


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 20), d=st.integers(1, 6), m=st.integers(1, 4))
def test_python_expand_definition(seed, n, d, m):
    kets, ops = _random(rng(seed), n, d, m)
    out = _chain_py.expand(kets, ops)
    assert out.shape == (n * m, d)
    for i in range(n):
        for j in range(m):
            np.testing.assert_allclose(out[i * m + j], ops[j] @ kets[i], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(0, 40), d=st.integers(1, 5))
def test_python_max_offdiag_definition(seed, n, d):
    kets = _random(rng(seed), n, d)
    worst, i, j = _chain_py.max_offdiag(kets)
    if n < 2:
        assert (worst, i, j) == (0.0, -1, -1)
        return
    gram = np.abs(kets.conj() @ kets.T)
    np.fill_diagonal(gram, -1)
    assert worst == pytest.approx(gram.max())
    assert i < j and gram[i, j] == pytest.approx(worst)


def test_python_max_offdiag_blocks():
    kets = _random(rng(0), 1300, 3)
    gram = np.abs(kets.conj() @ kets.T)
    np.fill_diagonal(gram, 0)
    assert _chain_py.max_offdiag(kets)[0] == pytest.approx(gram.max())


@needs_ext
@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 30), d=st.integers(1, 6), m=st.integers(1, 4))
def test_backends_agree_on_expand(seed, n, d, m):
    kets, ops = _random(rng(seed), n, d, m)
    np.testing.assert_allclose(_chain.expand(kets, ops), _chain_py.expand(kets, ops), atol=1e-12)


@needs_ext
@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(0, 60), d=st.integers(1, 5))
def test_backends_agree_on_max_offdiag(seed, n, d):
    kets = _random(rng(seed), n, d)
    a, b = _chain.max_offdiag(kets), _chain_py.max_offdiag(kets)
    assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-15)


@needs_ext
@pytest.mark.skipif(bool(os.environ.get("QHIST_PURE_PYTHON")), reason="fallback forced")
def test_extension_is_default():
    assert _kernels.BACKEND == "cython"


def test_fallback_can_be_forced():
    env = dict(os.environ, QHIST_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qhist; print(qhist.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_histories_identical_under_both_backends(monkeypatch):
    from qhist.scenarios import singlet_locality_sweep
    ref = singlet_locality_sweep(trials=10, seed=3).to_dict()
    monkeypatch.setattr(_kernels, "expand", _chain_py.expand)
    monkeypatch.setattr(_kernels, "max_offdiag", _chain_py.max_offdiag)
    alt = singlet_locality_sweep(trials=10, seed=3).to_dict()
    for c_ref, c_alt in zip(ref["checks"], alt["checks"]):
        assert c_ref["passed"] == c_alt["passed"]
        if isinstance(c_ref["value"], float):
            assert c_ref["value"] == pytest.approx(c_alt["value"], abs=1e-15)
