# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-entry walk kernels; same contract as ``_pykernels``."""

from libc.stdint cimport int64_t

NAME = "compiled"


cdef inline void _shift_one(int64_t* level, int64_t* pos, int64_t c, int64_t l) noexcept nogil:
    if level[0] == l:
        pos[0] = 2 * pos[0] + c
        level[0] = l + 1
    elif level[0] == l + 1 and (pos[0] & 1) == c:
        pos[0] >>= 1
        level[0] = l


def shift_level(int64_t[::1] level, int64_t[::1] pos, const int64_t[::1] chir, int64_t l):
    cdef Py_ssize_t i, size = level.shape[0]
    with nogil:
        for i in range(size):
            _shift_one(&level[i], &pos[i], chir[i], l)


def coin(int64_t[::1] chir, const int64_t[::1] addr, int64_t k):
    cdef Py_ssize_t i, size = chir.shape[0]
    with nogil:
        for i in range(size):
            chir[i] ^= (addr[i] >> k) & 1


def step_down(int64_t[::1] level, int64_t[::1] pos, int64_t[::1] chir,
              const int64_t[::1] addr, int64_t l, int64_t n):
    cdef Py_ssize_t i, size = level.shape[0]
    cdef int64_t c, a
    cdef bint upper = n - l < n
    with nogil:
        for i in range(size):
            a = addr[i]
            c = chir[i]
            if upper:
                c ^= (a >> (n - l)) & 1
            c ^= (a >> (n - l - 1)) & 1
            chir[i] = c
            _shift_one(&level[i], &pos[i], c, l)


def step_up(int64_t[::1] level, int64_t[::1] pos, int64_t[::1] chir,
            const int64_t[::1] addr, int64_t l, int64_t n):
    cdef Py_ssize_t i, size = level.shape[0]
    cdef int64_t c, a
    cdef bint upper = n - l < n
    with nogil:
        for i in range(size):
            a = addr[i]
            c = chir[i]
            _shift_one(&level[i], &pos[i], c, l)
            c ^= (a >> (n - l - 1)) & 1
            if upper:
                c ^= (a >> (n - l)) & 1
            chir[i] = c


def xor_leaves(const int64_t[::1] level, int64_t[::1] data, const int64_t[::1] values, int64_t n):
    cdef Py_ssize_t i, size = level.shape[0]
    with nogil:
        for i in range(size):
            if level[i] == n:
                data[i] ^= values[i]
