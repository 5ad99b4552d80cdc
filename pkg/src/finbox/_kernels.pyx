# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Same contracts as ``finbox._kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


cdef inline bint _member(const int64_t[:, ::1] Bu, Py_ssize_t k, const int64_t[::1] dmax,
                         const int64_t[::1] dmin, Py_ssize_t z, int64_t s) noexcept nogil:
    cdef Py_ssize_t i, n = Bu.shape[1]
    for i in range(n):
        if (z >> i) & 1:
            if Bu[k, i] - dmin[i] > -s:
                return False
        else:
            if Bu[k, i] - dmax[i] < s:
                return False
    return True


def first_members(const int64_t[:, ::1] Bu, const int64_t[::1] dmax, const int64_t[::1] dmin, bint strict):
    cdef Py_ssize_t N = Bu.shape[0], n = Bu.shape[1]
    cdef Py_ssize_t nv = (<Py_ssize_t>1) << n
    cdef cnp.ndarray[int64_t, ndim=1] out = np.full(nv, -1, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t s = 1 if strict else 0
    cdef Py_ssize_t z, k
    with nogil:
        for z in range(nv):
            for k in range(N):
                if _member(Bu, k, dmax, dmin, z, s):
                    o[z] = k
                    break
    return out


def member_mask(const int64_t[:, ::1] Bu, const int64_t[::1] dmax, const int64_t[::1] dmin,
                Py_ssize_t z, bint strict):
    cdef Py_ssize_t N = Bu.shape[0], k
    cdef cnp.ndarray[uint8_t, ndim=1] out = np.zeros(N, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef int64_t s = 1 if strict else 0
    with nogil:
        for k in range(N):
            o[k] = _member(Bu, k, dmax, dmin, z, s)
    return out.view(np.bool_)


def rollout_threshold(const double[::1] x0, const double[::1] thresholds,
                      const double[:, ::1] inc, const double[:, ::1] dw):
    cdef Py_ssize_t n = x0.shape[0], T = dw.shape[0], t, i, z
    cdef cnp.ndarray[double, ndim=2] states = np.empty((T + 1, n), dtype=np.float64)
    cdef cnp.ndarray[int64_t, ndim=1] zidx = np.empty(T, dtype=np.int64)
    cdef double[:, ::1] X = states
    cdef int64_t[::1] Z = zidx
    with nogil:
        for i in range(n):
            X[0, i] = x0[i]
        for t in range(T):
            z = 0
            for i in range(n):
                if X[t, i] > thresholds[i]:
                    z |= (<Py_ssize_t>1) << i
            Z[t] = z
            for i in range(n):
                X[t + 1, i] = X[t, i] + (inc[z, i] - dw[t, i])
    return states, zidx
