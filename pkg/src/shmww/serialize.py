"""Binary containers for keys and signatures.

Layout::

    magic "SHMWW1" (6 octets) | tag (1) | parameter-set id (1)
    | rows, cols as little-endian uint32 | payload

Payloads are row-major with each row packed LSB-first into octets and padded
to an octet boundary. ``rows, cols`` describe the leading matrix; the width
of any second component follows from the parameter set.

=====  =========  ==========  ===================================
tag    object     dims        payload
=====  =========  ==========  ===================================
0x01   pk         (n-k, n)    H rows, then S rows (k' bits each)
0x02   sk         (k', n)     E rows
0x03   signature  (n, k')     z, then c
=====  =========  ==========  ===================================
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .gf2 import BitMatrix, BitVector
from .params import PARAM_IDS, ParameterSet, get_params
from .scheme import PrivateKey, PublicKey, Signature

MAGIC = b"SHMWW1"
TAG_PK, TAG_SK, TAG_SIG = 0x01, 0x02, 0x03
TAG_NAMES = {TAG_PK: "public key", TAG_SK: "secret key", TAG_SIG: "signature"}
HEADER_SIZE = len(MAGIC) + 2 + 8


class FormatError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def _row_bytes(bits: int) -> int:
    return (bits + 7) // 8


def _matrix_bytes(M: BitMatrix) -> bytes:
    nb = _row_bytes(M.cols)
    raw = np.ascontiguousarray(M.words, dtype="<u8").view(np.uint8).reshape(M.rows, -1)
    return raw[:, :nb].tobytes()


def _header(tag: int, ps: ParameterSet, rows: int, cols: int) -> bytes:
    if ps.name not in PARAM_IDS:
        raise ValueError(f"parameter set {ps.name!r} has no container id")
    return MAGIC + bytes([tag, PARAM_IDS[ps.name]]) + struct.pack("<II", rows, cols)


def serialize(obj) -> bytes:
    if isinstance(obj, PublicKey):
        ps = obj.params
        return _header(TAG_PK, ps, ps.redundancy, ps.n) + _matrix_bytes(obj.H) + _matrix_bytes(obj.S)
    if isinstance(obj, PrivateKey):
        ps = obj.params
        return _header(TAG_SK, ps, ps.k_prime, ps.n) + _matrix_bytes(obj.E)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], ParameterSet):
        ps, sig = obj
        return _header(TAG_SIG, ps, ps.n, ps.k_prime) + sig.z.to_bytes() + sig.c.to_bytes()
    raise TypeError(f"cannot serialize {type(obj).__name__}; signatures go as (params, sig)")


def serialize_signature(ps: ParameterSet, sig: Signature) -> bytes:
    return serialize((ps, sig))


class _Reader:
    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        if self.pos + size > len(self.data):
            raise FormatError(
                f"truncated {what}: need {size} octets, {len(self.data) - self.pos} left", self.pos
            )
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out

    def matrix(self, rows: int, cols: int, what: str) -> BitMatrix:
        nb = _row_bytes(cols)
        start = self.pos
        raw = np.frombuffer(self.take(rows * nb, what), dtype=np.uint8).reshape(rows, nb)
        if cols % 8 and np.any(raw[:, -1] >> (cols % 8)):
            bad = int(np.flatnonzero(raw[:, -1] >> (cols % 8))[0])
            raise FormatError(f"non-zero padding bits in {what}", start + bad * nb + nb - 1)
        bits = np.unpackbits(raw, axis=1, count=cols, bitorder="little")
        return BitMatrix.from_bits(bits)

    def vector(self, length: int, what: str) -> BitVector:
        return self.matrix(1, length, what).row(0)


def deserialize(data: bytes):
    """Parse a container; signatures come back as ``(params, Signature)``."""
    r = _Reader(data)
    if r.take(len(MAGIC), "magic") != MAGIC:
        raise FormatError("bad magic", 0)
    tag, pid = r.take(2, "header")
    if tag not in TAG_NAMES:
        raise FormatError(f"unknown object tag 0x{tag:02x}", len(MAGIC))
    names = {v: k for k, v in PARAM_IDS.items()}
    if pid not in names:
        raise FormatError(f"unknown parameter-set id {pid}", len(MAGIC) + 1)
    ps = get_params(names[pid])
    rows, cols = struct.unpack("<II", r.take(8, "dimensions"))
    expected = {
        TAG_PK: (ps.redundancy, ps.n),
        TAG_SK: (ps.k_prime, ps.n),
        TAG_SIG: (ps.n, ps.k_prime),
    }[tag]
    if (rows, cols) != expected:
        raise FormatError(
            f"{TAG_NAMES[tag]} dimensions {rows}x{cols} do not match {ps.name} {expected}",
            len(MAGIC) + 2,
        )
    if tag == TAG_PK:
        H = r.matrix(rows, cols, "H")
        S = r.matrix(rows, ps.k_prime, "S")
        obj = PublicKey(ps, H, S)
    elif tag == TAG_SK:
        obj = PrivateKey(ps, r.matrix(rows, cols, "E"))
    else:
        z = r.vector(ps.n, "z")
        c = r.vector(ps.k_prime, "c")
        obj = (ps, Signature(z, c))
    if r.pos != len(r.data):
        raise FormatError(f"{len(r.data) - r.pos} trailing octets", r.pos)
    return obj


def save(path, obj) -> None:
    Path(path).write_bytes(serialize(obj))


def load(path):
    return deserialize(Path(path).read_bytes())


def load_signature(path) -> tuple[ParameterSet, Signature]:
    obj = load(path)
    if not (isinstance(obj, tuple) and isinstance(obj[1], Signature)):
        raise FormatError(f"{path} does not hold a signature", len(MAGIC))
    return obj
