# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Dense row reduction mod a prime: compiled kernel.

Mirrors _gfelim_py exactly (same pivot policy, same outputs); the pure
module is the executable specification.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef long long _inv_mod(long long a, long long p):
    # p is prime, 0 < a < p: Fermat
    cdef long long result = 1
    cdef long long base = a % p
    cdef long long e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def rref(a, long long p):
    """Reduced row echelon form mod p. Returns (R, pivot columns)."""
    r_arr = np.ascontiguousarray(a, dtype=np.int64) % p
    if r_arr.ndim != 2:
        raise ValueError("rref needs a 2D array")
    cdef long long[:, ::1] r = r_arr
    cdef Py_ssize_t rows = r.shape[0], cols = r.shape[1]
    cdef Py_ssize_t row = 0, col, k, j, i, pr
    cdef long long inv, factor, tmp
    pivots = []
    for col in range(cols):
        if row == rows:
            break
        pr = -1
        for k in range(row, rows):
            if r[k, col] != 0:
                pr = k
                break
        if pr < 0:
            continue
        if pr != row:
            for j in range(cols):
                tmp = r[row, j]
                r[row, j] = r[pr, j]
                r[pr, j] = tmp
        inv = _inv_mod(r[row, col], p)
        for j in range(cols):
            r[row, j] = (r[row, j] * inv) % p
        for i in range(rows):
            if i == row:
                continue
            factor = r[i, col]
            if factor == 0:
                continue
            for j in range(cols):
                r[i, j] = (r[i, j] - factor * r[row, j]) % p
                if r[i, j] < 0:
                    r[i, j] += p
        pivots.append(col)
        row += 1
    return r_arr, tuple(pivots)


def rank(a, long long p):
    return len(rref(a, p)[1])


def nullspace(a, long long p):
    """Rows of the result form a basis of {x : a x = 0 mod p}."""
    r_arr, pivots = rref(a, p)
    cdef long long[:, ::1] r = r_arr
    cdef Py_ssize_t cols = r.shape[1]
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    out_arr = np.zeros((len(free), cols), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef Py_ssize_t k, i, f
    for k in range(len(free)):
        f = free[k]
        out[k, f] = 1
        for i in range(len(pivots)):
            out[k, <Py_ssize_t>pivots[i]] = (p - r[i, f]) % p
    return out_arr
