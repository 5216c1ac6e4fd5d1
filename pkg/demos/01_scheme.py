"""
The SHMWW signature scheme
==========================

Key structure on the toy set, then sign and verify on Para-1.
"""

import numpy as np

from shmww import PARA1, TOY, keygen, make_rng, sign, verify
from shmww.gf2 import BitVector
from shmww.scheme import Signature, assemble_private_key

# the secret is P1 [E_1 | E_2] P2 with E_i = (I | R_i)
R1 = [[0, 1, 0, 1], [1, 1, 1, 1], [1, 1, 0, 1], [0, 1, 1, 0]]
R2 = [[1, 1, 0, 1], [1, 0, 1, 0], [0, 1, 1, 0], [0, 0, 1, 1]]
P2 = np.array([3, 8, 10, 4, 1, 15, 5, 13, 11, 14, 16, 9, 2, 7, 6, 12]) - 1
sk = assemble_private_key(TOY, [R1, R2], np.arange(4), P2)
print(sk.E.to_bits())
print("random columns (1-based):", sorted(i + 1 for i in sk.trace.random_columns))

# columns outside I_R carry exactly one set bit
print("column weights:", sk.E.column_weights())

# a real key pair
pk, sk = keygen(PARA1, b"demo")
print("H", pk.H.shape, "S", pk.S.shape, "E", sk.E.shape)

rng = make_rng(1)
sig = sign(sk, pk, b"hello", rng)
print("wt(z) =", sig.z.weight(), "<=", PARA1.weight_bound, " wt(c) =", sig.c.weight())
print("verify:", verify(pk, b"hello", sig))
print("wrong message:", verify(pk, b"hellO", sig))

flip = BitVector.from_support(PARA1.n, [17])
print("one bit of z flipped:", verify(pk, b"hello", Signature(sig.z ^ flip, sig.c)))
