"""Pure-numpy implementation of the chain-vector kernels.

Must stay behaviourally identical to the compiled ``_chain`` module.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 512


def expand(kets: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """Apply every operator to every ket.

    ``kets`` is (N, d), ``ops`` is (m, d, d); row ``n * m + j`` of the
    (N * m, d) result is ``ops[j] @ kets[n]``.
    """
    kets = np.ascontiguousarray(kets, dtype=np.complex128)
    ops = np.ascontiguousarray(ops, dtype=np.complex128)
    n, d = kets.shape
    out = np.einsum("jab,nb->nja", ops, kets)
    return out.reshape(n * ops.shape[0], d)


def max_offdiag(kets: np.ndarray) -> tuple[float, int, int]:
    """Largest |<K_i, K_j>| over i < j, scanning the Gram matrix in row blocks.

    Returns ``(0.0, -1, -1)`` when there are fewer than two rows.
    """
    kets = np.ascontiguousarray(kets, dtype=np.complex128)
    n = kets.shape[0]
    best, bi, bj = 0.0, -1, -1
    for start in range(0, n, _BLOCK):
        rows = kets[start:start + _BLOCK]
        g = np.abs(rows.conj() @ kets.T)
        r = np.arange(rows.shape[0])
        # keep strictly upper-triangular entries only
        mask = np.arange(n)[None, :] > (start + r)[:, None]
        g = np.where(mask, g, -1.0)
        k = int(np.argmax(g))
        i, j = divmod(k, n)
        if g[i, j] > best:
            best, bi, bj = float(g[i, j]), start + i, j
    return best, bi, bj
