"""Exact linear algebra over the supported scalar types.

Prime-field elimination dispatches to the compiled kernel when it is
importable (set BIQUIVER_PURE=1 to force the pure one); rational
elimination is Fraction arithmetic throughout. Matrices at this layer are
tuples of tuples of field elements; prime-field entries are plain ints.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fields import PrimeField, RationalField

if os.environ.get("BIQUIVER_PURE"):
    from . import _gfelim_py as _gf
else:
    try:
        from . import _gfelim as _gf  # type: ignore[attr-defined]
    except ImportError:
        from . import _gfelim_py as _gf


def kernel_backend() -> str:
    return _gf.BACKEND


Matrix = Tuple[Tuple[object, ...], ...]


def as_matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def zeros(field, n: int, m: int) -> Matrix:
    z = field.zero
    return tuple((z,) * m for _ in range(n))


def identity(field, n: int) -> Matrix:
    z, o = field.zero, field.one
    return tuple(tuple(o if i == j else z for j in range(n))
                 for i in range(n))


def mat_add(field, a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(field.add(x, y) for x, y in zip(ra, rb))
                 for ra, rb in zip(a, b))


def mat_sub(field, a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(field.sub(x, y) for x, y in zip(ra, rb))
                 for ra, rb in zip(a, b))


def mat_neg(field, a: Matrix) -> Matrix:
    return tuple(tuple(field.neg(x) for x in r) for r in a)


def mat_scale(field, c, a: Matrix) -> Matrix:
    return tuple(tuple(field.mul(c, x) for x in r) for r in a)


def mat_mul(field, a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError(f"shape mismatch: {len(a)}x{len(a[0])} @ {len(b)}x{len(b[0])}")
    if not b:
        return tuple(() for _ in a)
    bt = list(zip(*b))
    out = []
    for ra in a:
        row = []
        for cb in bt:
            acc = field.zero
            for x, y in zip(ra, cb):
                acc = field.add(acc, field.mul(x, y))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def is_zero_matrix(field, a: Matrix) -> bool:
    return all(field.is_zero(x) for r in a for x in r)


def block_matrix(field, blocks: Sequence[Sequence[Matrix]],
                 row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a matrix from a grid of blocks with the given block sizes.

    Sizes are passed explicitly because zero-width blocks carry no shape of
    their own in the tuple encoding."""
    out = []
    for i, r in enumerate(row_sizes):
        for bi, b in enumerate(blocks[i]):
            if len(b) != r:
                raise ValueError(f"block ({i},{bi}) has {len(b)} rows, expected {r}")
        for k in range(r):
            row: List[object] = []
            for j, c in enumerate(col_sizes):
                part = blocks[i][j][k]
                if len(part) != c:
                    raise ValueError(f"block ({i},{j}) has width {len(part)}, "
                                     f"expected {c}")
                row.extend(part)
            out.append(tuple(row))
    return tuple(out)


# ---------------------------------------------------------------------------
# elimination

def _rref_fraction(rows: List[List[Fraction]]):
    r = [list(map(Fraction, row)) for row in rows]
    nrows = len(r)
    ncols = len(r[0]) if nrows else 0
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        pr = next((k for k in range(row, nrows) if r[k][col] != 0), None)
        if pr is None:
            continue
        r[row], r[pr] = r[pr], r[row]
        inv = 1 / r[row][col]
        r[row] = [x * inv for x in r[row]]
        for i in range(nrows):
            if i != row and r[i][col] != 0:
                f = r[i][col]
                r[i] = [x - f * y for x, y in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
    return r, tuple(pivots)


def rref(field, rows: Sequence[Sequence[object]]):
    """(reduced matrix, pivot columns) over the given field."""
    if not rows or not rows[0]:
        return as_matrix(rows), ()
    if isinstance(field, PrimeField):
        arr = np.array(rows, dtype=np.int64)
        red, pivots = _gf.rref(arr, field.p)
        return as_matrix(red.tolist()), pivots
    if isinstance(field, RationalField):
        red, pivots = _rref_fraction([list(r) for r in rows])
        return as_matrix(red), pivots
    raise TypeError(f"no elimination over {field!r}")


def rank(field, rows: Sequence[Sequence[object]]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(field, rows)[1])


def nullspace(field, rows: Sequence[Sequence[object]],
              ncols: Optional[int] = None) -> List[Tuple[object, ...]]:
    """Basis (list of row vectors) of the right kernel. `ncols` covers the
    no-equations case, where the kernel is everything."""
    if not rows:
        if ncols is None:
            raise ValueError("nullspace of an empty system needs ncols")
        return [tuple(identity(field, ncols)[i]) for i in range(ncols)]
    width = len(rows[0])
    if ncols is not None and ncols != width:
        raise ValueError("ncols disagrees with the system width")
    if width == 0:
        return []
    if isinstance(field, PrimeField):
        arr = np.array(rows, dtype=np.int64)
        basis = _gf.nullspace(arr, field.p)
        return [tuple(int(x) for x in row) for row in basis]
    red, pivots = rref(field, rows)
    pset = set(pivots)
    free = [c for c in range(width) if c not in pset]
    out = []
    for f in free:
        vec = [field.zero] * width
        vec[f] = field.one
        for i, pc in enumerate(pivots):
            vec[pc] = field.neg(red[i][f])
        out.append(tuple(vec))
    return out


def solve(field, a: Sequence[Sequence[object]],
          b: Sequence[object]) -> Optional[List[object]]:
    """One solution of a x = b, or None."""
    if not a:
        return [] if all(field.is_zero(x) for x in b) else None
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(field, aug)
    width = len(a[0])
    if width in pivots:
        return None  # pivot in the constant column
    x = [field.zero] * width
    for i, pc in enumerate(pivots):
        x[pc] = red[i][width]
    return x


def invertible(field, a: Matrix) -> bool:
    n = len(a)
    if n == 0:
        return True
    if len(a[0]) != n:
        return False
    return rank(field, a) == n
