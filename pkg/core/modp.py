"""
Linear algebra over Z_p, backed by galois field arrays
"""

import itertools
from functools import lru_cache

import galois
import numpy as np

from core.errors import InvalidParameters, NoSolution


@lru_cache(maxsize=None)
def field(p):
    """GF(p) array class; p must be prime"""
    if not galois.is_prime(int(p)):
        raise InvalidParameters(f"modulus {p} is not prime")
    return galois.GF(int(p))


def to_int(arr):
    return np.array(arr, dtype=np.int64)


def reduce(arr, p):
    return np.mod(np.asarray(arr, dtype=np.int64), p)


def centered(arr, p):
    """Representatives of arr mod p in (-p/2, p/2]"""
    r = reduce(arr, p)
    return np.where(2 * r > p, r - p, r)


def rank(mat, p):
    mat = reduce(mat, p)
    if mat.size == 0:
        return 0
    return int(np.linalg.matrix_rank(field(p)(mat)))


def row_reduce(mat, p, ncols=None):
    """Reduced row echelon form mod p as an int array"""
    mat = reduce(mat, p)
    if mat.size == 0:
        return mat
    return to_int(field(p)(mat).row_reduce(ncols=ncols))


def pivot_columns(rref):
    """First nonzero column of every nonzero row of an echelon form"""
    pivots = []
    for row in rref:
        nz = np.flatnonzero(row)
        if nz.size:
            pivots.append(int(nz[0]))
    return pivots


def null_space(mat, p):
    """Rows spanning {x : mat @ x = 0 mod p}"""
    mat = reduce(mat, p)
    cols = mat.shape[1]
    if mat.shape[0] == 0 or not mat.any():
        return np.eye(cols, dtype=np.int64)
    return to_int(field(p)(mat).null_space()).reshape(-1, cols)


def solve_particular(mat, rhs, p):
    """One solution of mat @ x = rhs mod p, free variables set to zero"""
    mat = reduce(mat, p)
    rhs = reduce(rhs, p).reshape(-1, 1)
    rows, cols = mat.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.int64)
    rref = row_reduce(np.hstack([mat, rhs]), p, ncols=cols)
    x = np.zeros(cols, dtype=np.int64)
    for row in rref:
        nz = np.flatnonzero(row[:cols])
        if nz.size == 0:
            if row[cols] != 0:
                raise NoSolution("inconsistent congruence system")
            continue
        x[nz[0]] = row[cols]
    return x


def right_inverse(mat, p):
    """R with mat @ R = I mod p, for a full-row-rank mat"""
    rows = mat.shape[0]
    if rank(mat, p) != rows:
        raise NoSolution("matrix does not have full row rank mod p")
    eye = np.eye(rows, dtype=np.int64)
    return np.stack([solve_particular(mat, eye[:, j], p) for j in range(rows)], axis=1)


def span_members(basis_rows, p):
    """Every Z_p combination of the given rows, in lexicographic coefficient order"""
    basis_rows = np.asarray(basis_rows, dtype=np.int64)
    k, cols = basis_rows.shape
    if k == 0:
        return np.zeros((1, cols), dtype=np.int64)
    coeffs = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64)
    return reduce(coeffs @ basis_rows, p)


def in_column_span(gen, v, p):
    """True when v lies in the Z_p column span of gen"""
    v = reduce(v, p)
    if gen.shape[1] == 0:
        return not v.any()
    return rank(np.hstack([gen, v.reshape(-1, 1)]), p) == rank(gen, p)


def residues(p, count, start, stop):
    """Rows start..stop-1 of the lexicographic enumeration of Z_p^count"""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.size, count), dtype=np.int64)
    for c in range(count - 1, -1, -1):
        digits[:, c] = idx % p
        idx //= p
    return digits
