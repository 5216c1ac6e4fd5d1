"""
Full key recovery from 32 signatures
====================================

Count bits, threshold at floor(N * balanced delta), then decode every row of
E with free sets forced over the guessed random columns.
"""

from shmww import PARA1, experimental_threshold, full_attack, keygen, make_rng
from shmww.scheme import sign_many

rng = make_rng(b"demo-attack")
pk, sk = keygen(PARA1, rng)
_, sigs = sign_many(sk, pk, 32, rng)

tau = experimental_threshold(PARA1, 32)
report = full_attack(pk, sigs, tau=tau, rng=rng)

truth = sk.trace.random_columns
print("tau", tau, " guessed", report.guessed_size, " true", len(truth),
      " missed", len(truth - report.guessed), " extra", len(report.guessed - truth))
print("free sets", report.samples, " singular", report.singular, f" {report.seconds:.1f}s")
print("success", report.success, " equal to the real key", report.key == sk.E)
