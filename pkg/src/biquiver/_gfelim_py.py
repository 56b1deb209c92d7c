"""Dense row reduction mod a prime: pure numpy reference kernel.

Same API and pivot policy as the compiled kernel, so outputs are
bit-identical; the dispatcher in linalg picks whichever is available.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def rref(a: np.ndarray, p: int):
    """Reduced row echelon form mod p. Returns (R, pivot columns).

    Pivot policy: columns left to right, first nonzero row at or below the
    working row.
    """
    r = np.ascontiguousarray(a, dtype=np.int64) % p
    if r.ndim != 2:
        raise ValueError("rref needs a 2D array")
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        pr = -1
        for k in range(row, rows):
            if r[k, col]:
                pr = k
                break
        if pr < 0:
            continue
        if pr != row:
            r[[row, pr]] = r[[pr, row]]
        inv = pow(int(r[row, col]), p - 2, p)
        r[row] = (r[row] * inv) % p
        col_vals = r[:, col].copy()
        col_vals[row] = 0
        r = (r - np.outer(col_vals, r[row])) % p
        pivots.append(col)
        row += 1
    return r, tuple(pivots)


def rank(a: np.ndarray, p: int) -> int:
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Rows of the result form a basis of {x : a x = 0 mod p}."""
    r, pivots = rref(a, p)
    cols = r.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = (-int(r[i, f])) % p
    return out
