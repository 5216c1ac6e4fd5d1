"""Bit-packed vectors and matrices over GF(2).

Bits are stored little-endian in ``uint64`` words: bit ``j`` of a row is bit
``j % 64`` of word ``j // 64``. Padding bits past the logical length are kept
at zero, so word-wise equality is logical equality. Every object is immutable
once constructed.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

WORD_BITS = 64


class SingularMatrixError(ArithmeticError):
    """Raised when a square system has no unique solution."""


def n_words(nbits: int) -> int:
    return (nbits + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array along its last axis into ``uint64`` words."""
    bits = np.asarray(bits, dtype=np.uint8)
    nbits = bits.shape[-1]
    packed = np.packbits(bits, axis=-1, bitorder="little")
    nbytes = n_words(nbits) * 8
    if packed.shape[-1] != nbytes:
        pad = [(0, 0)] * (packed.ndim - 1) + [(0, nbytes - packed.shape[-1])]
        packed = np.pad(packed, pad)
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a ``uint8`` 0/1 array."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=-1, count=nbits, bitorder="little")


def _tail_mask(nbits: int) -> np.uint64:
    rem = nbits % WORD_BITS
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint64)
    a.flags.writeable = False
    return a


class BitVector:
    """Immutable binary vector of fixed length."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray):
        if length < 0:
            raise ValueError("length must be non-negative")
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != n_words(length):
            raise ValueError(f"expected {n_words(length)} words, got {words.shape[0]}")
        if length and words[-1] & ~_tail_mask(length):
            raise ValueError("padding bits must be zero")
        self.length = length
        self.words = _frozen(words)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, np.zeros(n_words(length), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits) -> BitVector:
        bits = np.asarray(bits, dtype=np.uint8).reshape(-1) & 1
        return cls(bits.shape[0], pack_bits(bits))

    @classmethod
    def from_support(cls, length: int, support) -> BitVector:
        bits = np.zeros(length, dtype=np.uint8)
        bits[np.asarray(support, dtype=np.int64)] = 1
        return cls.from_bits(bits)

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.length)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.to_bits())

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def to_bytes(self) -> bytes:
        """LSB-first octets, ``ceil(length / 8)`` of them."""
        return self.words.astype("<u8").tobytes()[: (self.length + 7) // 8]

    @classmethod
    def from_bytes(cls, length: int, data: bytes) -> BitVector:
        buf = np.frombuffer(data, dtype=np.uint8)
        return cls.from_bits(np.unpackbits(buf, count=length, bitorder="little"))

    def _check(self, other: BitVector) -> None:
        if not isinstance(other, BitVector) or other.length != self.length:
            raise ValueError("length mismatch")

    def __xor__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.words ^ other.words)

    __add__ = __xor__

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.words & other.words)

    def __or__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.words | other.words)

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        i %= self.length
        return int((self.words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.length <= 64:
            return f"BitVector({''.join(map(str, self.to_bits()))})"
        return f"BitVector(length={self.length}, weight={self.weight()})"


class BitMatrix:
    """Immutable row-major binary matrix."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.array(words, dtype=np.uint64)
        if words.shape != (rows, n_words(cols)):
            raise ValueError(f"expected word array of shape {(rows, n_words(cols))}, got {words.shape}")
        if rows and cols and np.any(words[:, -1] & ~_tail_mask(cols)):
            raise ValueError("padding bits must be zero")
        self.rows = rows
        self.cols = cols
        self.words = _frozen(words)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, m: int) -> BitMatrix:
        return cls.from_bits(np.eye(m, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits) -> BitMatrix:
        bits = np.asarray(bits, dtype=np.uint8) & 1
        if bits.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(bits.shape[0], bits.shape[1], pack_bits(bits))

    @classmethod
    def from_rows(cls, rows: list[BitVector]) -> BitMatrix:
        if not rows:
            raise ValueError("need at least one row")
        cols = rows[0].length
        if any(r.length != cols for r in rows):
            raise ValueError("rows must share a length")
        return cls(len(rows), cols, np.stack([r.words for r in rows]))

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
        return cls.from_bits(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.words[i])

    def column(self, j: int) -> BitVector:
        if not 0 <= j < self.cols:
            raise IndexError(j)
        return BitVector.from_bits((self.words[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    @property
    def T(self) -> BitMatrix:
        return BitMatrix.from_bits(self.to_bits().T)

    def select_columns(self, cols) -> BitMatrix:
        return BitMatrix.from_bits(self.to_bits()[:, np.asarray(cols, dtype=np.int64)])

    def column_weights(self) -> np.ndarray:
        return self.to_bits().sum(axis=0, dtype=np.int64)

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __xor__(self, other: BitMatrix) -> BitMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self.words ^ other.words)

    __add__ = __xor__

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            return mat_mul(self, other)
        if isinstance(other, BitVector):
            return mat_vec_mul(self, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and bool(
            np.array_equal(self.words, other.words)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, weight={self.weight()})"


def mat_vec_mul(M: BitMatrix, v: BitVector) -> BitVector:
    """``M v^T``: bit ``i`` is the parity of ``row_i(M) AND v``."""
    if v.length != M.cols:
        raise ValueError(f"dimension mismatch: {M.cols} columns vs vector of length {v.length}")
    parity = np.bitwise_count(M.words & v.words).sum(axis=1) & 1
    return BitVector.from_bits(parity)


def vec_mat_mul(v: BitVector, M: BitMatrix) -> BitVector:
    """``v M``: XOR of the rows of ``M`` selected by the set bits of ``v``."""
    if v.length != M.rows:
        raise ValueError(f"dimension mismatch: vector of length {v.length} vs {M.rows} rows")
    idx = v.support()
    if idx.size == 0:
        return BitVector.zeros(M.cols)
    return BitVector(M.cols, np.bitwise_xor.reduce(M.words[idx], axis=0))


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    return BitMatrix(A.rows, B.cols, _kernels.mat_mul(A.words, B.words, A.cols))


def rank(M: BitMatrix) -> int:
    return int(_kernels.row_echelon_rank(M.words.copy(), M.cols))


def is_invertible(A: BitMatrix) -> bool:
    if A.rows != A.cols:
        raise ValueError(f"matrix is not square: {A.shape}")
    return bool(_kernels.gauss_jordan(A.words.copy(), A.rows))


def solve_bits(A_bits: np.ndarray, B_bits: np.ndarray) -> np.ndarray:
    """Solve ``A X = B`` for 0/1 arrays ``A`` (m x m) and ``B`` (m x r).

    Returns ``X`` as a packed ``(r, words(m))`` array whose row ``t`` is the
    solution for column ``t`` of ``B``. Raises :class:`SingularMatrixError`.
    """
    m = A_bits.shape[0]
    if A_bits.shape != (m, m) or B_bits.shape[0] != m:
        raise ValueError("dimension mismatch")
    r = B_bits.shape[1]
    work = pack_bits(np.concatenate([A_bits, B_bits], axis=1))
    if not _kernels.gauss_jordan(work, m):
        raise SingularMatrixError("matrix is singular")
    # trailing columns now hold X (m x r); return it transposed, one solution per row
    sol = unpack_bits(work, m + r)[:, m:]
    return pack_bits(np.ascontiguousarray(sol.T))


def solve_square(A: BitMatrix, b: BitVector) -> BitVector:
    """Unique ``x`` with ``A x^T = b^T``; raises SingularMatrixError if rank(A) < m."""
    if A.rows != A.cols:
        raise ValueError(f"matrix is not square: {A.shape}")
    if b.length != A.rows:
        raise ValueError(f"dimension mismatch: {A.rows} rows vs rhs of length {b.length}")
    x = solve_bits(A.to_bits(), b.to_bits()[:, None])
    return BitVector(A.cols, x[0])


def solve_many(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """Solve ``A X = B``; row ``t`` of the result solves column ``t`` of ``B``."""
    if A.rows != A.cols:
        raise ValueError(f"matrix is not square: {A.shape}")
    if B.rows != A.rows:
        raise ValueError("dimension mismatch")
    return BitMatrix(B.cols, A.cols, solve_bits(A.to_bits(), B.to_bits()))


def invertible_fraction(m: int) -> float:
    """Probability that a uniform m x m binary matrix is invertible."""
    return float(np.prod(1.0 - 0.5 ** np.arange(1, m + 1, dtype=np.float64)))
