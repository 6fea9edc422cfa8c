# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain-vector kernels; see ``_chain_py`` for the reference version."""

import numpy as np

from libc.math cimport sqrt


def expand(kets, ops):
    cdef const double complex[:, ::1] k = np.ascontiguousarray(kets, dtype=np.complex128)
    cdef const double complex[:, :, ::1] o = np.ascontiguousarray(ops, dtype=np.complex128)
    cdef Py_ssize_t n = k.shape[0], d = k.shape[1], m = o.shape[0]
    out = np.empty((n * m, d), dtype=np.complex128)
    cdef double complex[:, ::1] res = out
    cdef Py_ssize_t r, j, a, b
    cdef double complex s
    for r in range(n):
        for j in range(m):
            for a in range(d):
                s = 0
                for b in range(d):
                    s = s + o[j, a, b] * k[r, b]
                res[r * m + j, a] = s
    return out


def max_offdiag(kets):
    arr = np.ascontiguousarray(kets, dtype=np.complex128)
    cdef const double[:, ::1] re = np.ascontiguousarray(arr.real)
    cdef const double[:, ::1] im = np.ascontiguousarray(arr.imag)
    cdef Py_ssize_t n = re.shape[0], d = re.shape[1]
    cdef Py_ssize_t i, j, a, bi = -1, bj = -1
    cdef double sr, si, xr, xi, yr, yi, v, best = 0.0
    # compare squared moduli; one square root at the end
    for i in range(n):
        for j in range(i + 1, n):
            sr = 0.0
            si = 0.0
            for a in range(d):
                xr = re[i, a]
                xi = im[i, a]
                yr = re[j, a]
                yi = im[j, a]
                sr = sr + xr * yr + xi * yi
                si = si + xr * yi - xi * yr
            v = sr * sr + si * si
            if v > best:
                best = v
                bi = i
                bj = j
    return sqrt(best), bi, bj
