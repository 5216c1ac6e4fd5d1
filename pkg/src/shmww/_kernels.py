"""Compiled word-level GF(2) kernels.

All kernels work on row-major ``uint64`` arrays where bit ``j`` of a row lives
in word ``j >> 6`` at position ``j & 63``. Kernels mutate their first argument
only when documented; callers pass copies.
"""

import numba
import numpy as np

ONE = np.uint64(1)


@numba.njit(cache=True, nogil=True)
def gauss_jordan(M, m):
    """Reduce the leading ``m`` columns of the ``m``-row matrix ``M`` in place.

    Returns False as soon as a column without a pivot is found. On success the
    leading block is the identity and the trailing columns hold ``A^-1 B``.
    """
    W = M.shape[1]
    for c in range(m):
        cw = c >> 6
        cb = np.uint64(c & 63)
        piv = -1
        for r in range(c, m):
            if (M[r, cw] >> cb) & ONE:
                piv = r
                break
        if piv < 0:
            return False
        if piv != c:
            for w in range(cw, W):
                t = M[c, w]
                M[c, w] = M[piv, w]
                M[piv, w] = t
        for r in range(m):
            if r != c and (M[r, cw] >> cb) & ONE:
                for w in range(cw, W):
                    M[r, w] ^= M[c, w]
    return True


@numba.njit(cache=True, nogil=True)
def row_echelon_rank(M, ncols):
    """Rank of ``M`` (in place forward elimination over ``ncols`` columns)."""
    rows, W = M.shape
    rank = 0
    for c in range(ncols):
        if rank == rows:
            break
        cw = c >> 6
        cb = np.uint64(c & 63)
        piv = -1
        for r in range(rank, rows):
            if (M[r, cw] >> cb) & ONE:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(cw, W):
                t = M[rank, w]
                M[rank, w] = M[piv, w]
                M[piv, w] = t
        for r in range(rank + 1, rows):
            if (M[r, cw] >> cb) & ONE:
                for w in range(cw, W):
                    M[r, w] ^= M[rank, w]
        rank += 1
    return rank


@numba.njit(cache=True, nogil=True)
def mat_mul(A, B, inner):
    """Product of packed ``A`` (r x inner) and packed ``B`` (inner x c)."""
    r = A.shape[0]
    W = B.shape[1]
    C = np.zeros((r, W), dtype=np.uint64)
    for i in range(r):
        for j in range(inner):
            if (A[i, j >> 6] >> np.uint64(j & 63)) & ONE:
                for w in range(W):
                    C[i, w] ^= B[j, w]
    return C


@numba.njit(cache=True, nogil=True)
def xor_rows_by_support(M, supports, offsets):
    """Row ``t`` of the output is the XOR of ``M[supports[offsets[t]:offsets[t+1]]]``."""
    T = offsets.shape[0] - 1
    W = M.shape[1]
    out = np.zeros((T, W), dtype=np.uint64)
    for t in range(T):
        for p in range(offsets[t], offsets[t + 1]):
            j = supports[p]
            for w in range(W):
                out[t, w] ^= M[j, w]
    return out
