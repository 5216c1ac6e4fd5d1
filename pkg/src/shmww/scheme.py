"""Key generation, signing and verification.

The private key ``E`` is ``P1 [E_1 | ... | E_ell] P2`` with ``E_i = (I | R_i)``;
the public key is a random parity-check matrix ``H`` together with
``S = H E^T``. A signature on ``m`` is ``(z, c)`` with ``z = c E + e`` for a
fresh mask ``e`` of weight ``w2`` and ``c = WRH(m || H e^T)``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .gf2 import BitMatrix, BitVector, n_words, unpack_bits
from .params import ParameterSet

WRH_DOMAIN = b"SHMWW-WRH"


def make_rng(seed=None) -> np.random.Generator:
    """Deterministic generator from bytes, str, int, an existing Generator, or None."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, str):
        seed = seed.encode()
    if isinstance(seed, (bytes, bytearray)):
        if not seed:
            raise ValueError("seed must be non-empty")
        seed = int.from_bytes(hashlib.sha256(seed).digest(), "little")
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class PublicKey:
    params: ParameterSet
    H: BitMatrix
    S: BitMatrix

    def __post_init__(self):
        ps = self.params
        if self.H.shape != (ps.redundancy, ps.n):
            raise ValueError(f"H has shape {self.H.shape}, expected {(ps.redundancy, ps.n)}")
        if self.S.shape != (ps.redundancy, ps.k_prime):
            raise ValueError(f"S has shape {self.S.shape}, expected {(ps.redundancy, ps.k_prime)}")

    @cached_property
    def HT_words(self) -> np.ndarray:
        # row j is column j of H, so syndromes of sparse vectors are row XORs
        return self.H.T.words

    @cached_property
    def ST_words(self) -> np.ndarray:
        return self.S.T.words

    def syndrome(self, v: BitVector) -> BitVector:
        """``H v^T`` computed from the support of ``v``."""
        return _xor_selected(self.HT_words, v.support(), self.params.redundancy)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PublicKey):
            return NotImplemented
        return self.params == other.params and self.H == other.H and self.S == other.S


@dataclass(frozen=True)
class KeyTrace:
    """Generation trace kept for evaluating the attack.

    ``p1[i]`` is the block-matrix row placed at row ``i``; ``p2[j]`` is the
    position that block-matrix column ``j`` is moved to.
    """

    p1: np.ndarray
    p2: np.ndarray
    random_columns: frozenset[int]

    @property
    def identity_columns(self) -> np.ndarray:
        n = self.p2.shape[0]
        return np.setdiff1d(np.arange(n), sorted(self.random_columns))


@dataclass(frozen=True, eq=False)
class PrivateKey:
    params: ParameterSet
    E: BitMatrix
    trace: KeyTrace | None = None

    def __post_init__(self):
        ps = self.params
        if self.E.shape != (ps.k_prime, ps.n):
            raise ValueError(f"E has shape {self.E.shape}, expected {(ps.k_prime, ps.n)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrivateKey):
            return NotImplemented
        return self.params == other.params and self.E == other.E


@dataclass(frozen=True)
class Signature:
    z: BitVector
    c: BitVector


def _xor_selected(words: np.ndarray, idx: np.ndarray, nbits: int) -> BitVector:
    if len(idx) == 0:
        return BitVector.zeros(nbits)
    return BitVector(nbits, np.bitwise_xor.reduce(words[idx], axis=0))


def _random_bitmatrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    words = rng.integers(0, 2**64, size=(rows, n_words(cols)), dtype=np.uint64, endpoint=False)
    if cols % 64:
        words[:, -1] &= np.uint64((1 << (cols % 64)) - 1)
    return BitMatrix(rows, cols, words)


def block_matrix(params: ParameterSet, blocks: list[np.ndarray]) -> np.ndarray:
    """``[E_1 | ... | E_ell]`` as a 0/1 array, with ``E_i = (I_k' | R_i)``."""
    kp = params.k_prime
    eye = np.eye(kp, dtype=np.uint8)
    if len(blocks) != params.ell:
        raise ValueError(f"expected {params.ell} random blocks, got {len(blocks)}")
    parts = []
    for R in blocks:
        R = np.asarray(R, dtype=np.uint8)
        if R.shape != (kp, params.n_prime - kp):
            raise ValueError(f"random block has shape {R.shape}")
        parts += [eye, R]
    return np.concatenate(parts, axis=1)


def assemble_private_key(
    params: ParameterSet, blocks: list[np.ndarray], p1, p2
) -> PrivateKey:
    """Apply the row permutation ``p1`` and column permutation ``p2`` to the blocks."""
    p1 = np.asarray(p1, dtype=np.int64)
    p2 = np.asarray(p2, dtype=np.int64)
    if sorted(p1) != list(range(params.k_prime)) or sorted(p2) != list(range(params.n)):
        raise ValueError("p1 and p2 must be permutations")
    B = block_matrix(params, blocks)
    E = np.empty_like(B)
    E[:, p2] = B[p1]
    kp, np_ = params.k_prime, params.n_prime
    random_block_cols = np.concatenate(
        [np.arange(i * np_ + kp, (i + 1) * np_) for i in range(params.ell)]
    )
    trace = KeyTrace(p1=p1, p2=p2, random_columns=frozenset(int(i) for i in p2[random_block_cols]))
    return PrivateKey(params, BitMatrix.from_bits(E), trace)


def public_key_for(params: ParameterSet, H: BitMatrix, E: BitMatrix) -> PublicKey:
    pk = PublicKey(params, H, BitMatrix.zeros(params.redundancy, params.k_prime))
    supports = unpack_bits(E.words, E.cols)
    idx = np.nonzero(supports)
    offsets = np.searchsorted(idx[0], np.arange(E.rows + 1)).astype(np.int64)
    ST = _kernels.xor_rows_by_support(pk.HT_words, idx[1].astype(np.int64), offsets)
    S = BitMatrix(E.rows, params.redundancy, ST).T
    return PublicKey(params, H, S)


def keygen(params: ParameterSet, seed=None) -> tuple[PublicKey, PrivateKey]:
    """Generate a key pair; deterministic for a fixed seed."""
    params.validate()
    rng = make_rng(seed)
    H = _random_bitmatrix(params.redundancy, params.n, rng)
    kp, r = params.k_prime, params.n_prime - params.k_prime
    blocks = [rng.integers(0, 2, size=(kp, r), dtype=np.uint8) for _ in range(params.ell)]
    p1 = rng.permutation(kp)
    p2 = rng.permutation(params.n)
    sk = assemble_private_key(params, blocks, p1, p2)
    return public_key_for(params, H, sk.E), sk


def sample_fixed_weight(n: int, w: int, rng: np.random.Generator) -> BitVector:
    """Uniform vector of length ``n`` and weight exactly ``w``."""
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range for length {n}")
    return BitVector.from_support(n, rng.choice(n, size=w, replace=False))


def challenge_input(msg: bytes, s: BitVector) -> bytes:
    """Canonical encoding of ``msg || s``: length-prefixed message, then packed ``s``."""
    return WRH_DOMAIN + len(msg).to_bytes(8, "little") + bytes(msg) + s.to_bytes()


def weight_restricted_hash(msg: bytes, k_prime: int, w1: int) -> BitVector:
    """Digest of length ``k_prime`` and weight exactly ``w1``.

    SHAKE-256 output is read as little-endian integers; values at or above the
    largest multiple of ``k_prime`` are rejected, the rest are reduced modulo
    ``k_prime``, and the first ``w1`` distinct positions are set.
    """
    if not 0 <= w1 <= k_prime:
        raise ValueError(f"w1 = {w1} must lie in [0, k' = {k_prime}]")
    width = 2 if k_prime <= 1 << 16 else 4
    limit = ((1 << (8 * width)) // k_prime) * k_prime
    xof = hashlib.shake_256(msg)
    chosen: dict[int, None] = {}
    pos, length = 0, 4 * width * max(w1, 1)
    stream = xof.digest(length)
    while len(chosen) < w1:
        if pos + width > length:
            length *= 2
            stream = xof.digest(length)
        v = int.from_bytes(stream[pos:pos + width], "little")
        pos += width
        if v < limit:
            chosen.setdefault(v % k_prime)
    return BitVector.from_support(k_prime, list(chosen))


def sign(
    sk: PrivateKey, pk: PublicKey, msg: bytes, rng=None, raw_challenge: bool = False
) -> Signature:
    """Sign ``msg``. With ``raw_challenge`` the challenge is sampled directly
    as a random weight-``w1`` vector instead of hashed (such signatures do not
    verify but have the same distribution of ``z``)."""
    ps = sk.params
    rng = make_rng(rng)
    e = sample_fixed_weight(ps.n, ps.w2, rng)
    if raw_challenge:
        c = sample_fixed_weight(ps.k_prime, ps.w1, rng)
    else:
        s = pk.syndrome(e)
        c = weight_restricted_hash(challenge_input(msg, s), ps.k_prime, ps.w1)
    cE = _xor_selected(sk.E.words, c.support(), ps.n)
    return Signature(z=cE ^ e, c=c)


def verify(pk: PublicKey, msg: bytes, sig: Signature) -> bool:
    ps = pk.params
    if sig.z.length != ps.n or sig.c.length != ps.k_prime:
        return False
    if sig.z.weight() > ps.weight_bound:
        return False
    s_hat = pk.syndrome(sig.z) ^ _xor_selected(pk.ST_words, sig.c.support(), ps.redundancy)
    return weight_restricted_hash(challenge_input(msg, s_hat), ps.k_prime, ps.w1) == sig.c


def sign_many(sk: PrivateKey, pk: PublicKey, count: int, rng=None, raw_challenge=False,
              message_prefix: bytes = b"message-") -> tuple[list[bytes], list[Signature]]:
    """Sign ``count`` distinct messages; returns ``(messages, signatures)``."""
    rng = make_rng(rng)
    msgs = [message_prefix + str(i).encode() for i in range(count)]
    return msgs, [sign(sk, pk, m, rng, raw_challenge) for m in msgs]


def signatures_to_bits(signatures: list[Signature]) -> np.ndarray:
    """Stack the ``z`` components as an ``(N, n)`` 0/1 array."""
    words = np.stack([s.z.words for s in signatures])
    return unpack_bits(words, signatures[0].z.length)


def check_key_pair(pk: PublicKey, E: BitMatrix) -> bool:
    """True iff ``H E^T = S``."""
    return public_key_for(pk.params, pk.H, E).S == pk.S


__all__ = [
    "KeyTrace", "PrivateKey", "PublicKey", "Signature", "assemble_private_key",
    "block_matrix", "challenge_input", "check_key_pair", "keygen", "make_rng",
    "public_key_for", "sample_fixed_weight", "sign", "sign_many",
    "signatures_to_bits", "verify", "weight_restricted_hash",
]
