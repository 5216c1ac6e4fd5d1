"""Private-key recovery by information-set decoding with a forced free set.

Row ``j`` of ``E`` is the low-weight solution of ``H x^T = S[:, j]``. Once the
random columns are known, every free set ``F`` of ``n - k`` positions is
chosen to contain them, so only the ``ell`` identity positions of a row have
to be hit by chance. ``H_F`` is square; when it is invertible, solving the
system yields a candidate that is accepted if it is light outside the
guessed random columns.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .distinguisher import (
    DistinguisherConfig,
    guess_random_columns,
    min_signatures,
    nstar_optimal_delta,
    tally,
)
from .gf2 import BitMatrix, BitVector, invertible_fraction, pack_bits, unpack_bits
from .params import ParameterSet
from .scheme import PublicKey, Signature, check_key_pair, make_rng


class RowNotFound(RuntimeError):
    """No acceptable candidate was found within the iteration budget."""


class KeyRecoveryFailure(RuntimeError):
    def __init__(self, row: int, message: str = ""):
        super().__init__(message or f"could not recover row {row}")
        self.row = row


# closed forms


def isd_success_probability_exact(ps: ParameterSet) -> Fraction:
    r = ps.n_random
    if ps.redundancy < r + ps.ell:
        raise ValueError(
            f"n - k = {ps.redundancy} < ell (n' - k') + ell = {r + ps.ell}: "
            "the free set cannot hold a full row"
        )
    return Fraction(math.comb(ps.redundancy - r, ps.ell), math.comb(ps.n - r, ps.ell))


def isd_success_probability(ps: ParameterSet) -> float:
    """Probability that a free set forced to contain the random columns also
    contains the ``ell`` identity positions of a given row."""
    return float(isd_success_probability_exact(ps))


@dataclass(frozen=True)
class IsdEstimate:
    p: float
    invertible: float
    expected_iterations: float
    total_cost: float
    n_star: int
    attack_bound: float

    @property
    def log2_total_cost(self) -> float:
        return math.log2(self.total_cost)

    @property
    def log2_attack_bound(self) -> float:
        return math.log2(self.attack_bound)


def attack_cost_estimate(ps: ParameterSet, alpha_star: float = 0.9,
                         delta: float | None = None) -> IsdEstimate:
    """Average operation count of the key recovery.

    ``total_cost`` is ``k' (n-k)^3 / (P_inv p)``; ``attack_bound`` adds the
    ``n (N* + 1)`` cost of the counting phase.
    """
    p = isd_success_probability(ps)
    inv = invertible_fraction(ps.redundancy)
    cost = ps.k_prime * ps.redundancy**3 / (inv * p)
    if delta is None:
        delta = nstar_optimal_delta(alpha_star, ps)
    n_star = min_signatures(alpha_star, delta, ps)
    return IsdEstimate(p=p, invertible=inv, expected_iterations=1 / (inv * p),
                       total_cost=cost, n_star=n_star,
                       attack_bound=ps.n * (n_star + 1) + cost)


# sampling and acceptance


def sample_free_set(n: int, size: int, forced: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``size``-subset of ``range(n)`` containing ``forced``."""
    forced = np.asarray(forced, dtype=np.int64)
    if forced.size > size:
        raise ValueError(f"{forced.size} forced positions do not fit in a free set of size {size}")
    mask = np.ones(n, dtype=bool)
    mask[forced] = False
    rest = np.flatnonzero(mask)
    extra = rng.choice(rest, size=size - forced.size, replace=False)
    return np.sort(np.concatenate([forced, extra]))


def acceptance_bound(free: int, ell: int, log2_false_accept: float = -64.0) -> int:
    """Largest weight that a random candidate on ``free`` positions reaches
    with probability at most ``2**log2_false_accept``; never below ``ell``."""
    if free + log2_false_accept < 0:
        return ell
    target = 2 ** math.floor(free + log2_false_accept)
    acc, c, w = 0, 1, -1
    for i in range(free + 1):
        if acc + c > target:
            break
        acc += c
        w = i
        c = c * (free - i) // (i + 1)
    return max(ell, w)


def _outside_weight(x_words: np.ndarray, outside_mask_words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x_words & outside_mask_words).sum(axis=-1)


class _Problem:
    """0/1 views of ``H`` and the syndromes, kept for repeated column gathers."""

    def __init__(self, H: BitMatrix, S_bits: np.ndarray, guessed):
        self.m, self.n = H.shape
        self.H_bits = H.to_bits()
        self.S_bits = S_bits
        self.guessed = np.array(sorted(int(i) for i in guessed), dtype=np.int64)
        if self.guessed.size > self.m:
            raise ValueError(
                f"{self.guessed.size} guessed random columns exceed n - k = {self.m}; "
                "raise the threshold"
            )
        outside = np.ones(self.n, dtype=np.uint8)
        outside[self.guessed] = 0
        self.outside_words = pack_bits(outside)
        self.free_outside = self.m - self.guessed.size

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return sample_free_set(self.n, self.m, self.guessed, rng)

    def solve(self, F: np.ndarray, rhs_cols: np.ndarray):
        """Solutions (packed, one per rhs) embedded in length ``n``, or None if ``H_F`` is singular."""
        m = self.m
        work = pack_bits(np.concatenate([self.H_bits[:, F], self.S_bits[:, rhs_cols]], axis=1))
        if not _kernels.gauss_jordan(work, m):
            return None
        sol = unpack_bits(work, m + len(rhs_cols))[:, m:]
        full = np.zeros((len(rhs_cols), self.n), dtype=np.uint8)
        full[:, F] = sol.T
        return pack_bits(full)


@dataclass
class RowRecovery:
    row: BitVector
    iterations: int
    singular: int


@dataclass
class KeyRecovery:
    E: BitMatrix
    iterations: list[int]
    singular: int
    samples: int


def _recover_row(prob: _Problem, j: int, rng: np.random.Generator, max_iters: int,
                 max_weight: int) -> RowRecovery:
    singular = 0
    for it in range(1, max_iters + 1):
        F = prob.sample(rng)
        x = prob.solve(F, np.array([j]))
        if x is None:
            singular += 1
            continue
        if _outside_weight(x[0], prob.outside_words) <= max_weight:
            return RowRecovery(BitVector(prob.n, x[0]), it, singular)
    raise RowNotFound(f"syndrome {j}: no candidate after {max_iters} iterations")


def recover_row(H: BitMatrix, s: BitVector, guessed, ell: int, rng=None,
                max_iters: int = 1000, max_weight: int | None = None) -> RowRecovery:
    """Find a vector ``x`` with ``H x^T = s`` that is light outside ``guessed``.

    Each iteration draws a fresh free set; a singular ``H_F`` simply costs an
    iteration. A candidate is accepted when its weight outside ``guessed`` is
    at most ``max_weight`` (default ``ell``).
    """
    if s.length != H.rows:
        raise ValueError(f"syndrome length {s.length} != {H.rows} rows of H")
    prob = _Problem(H, s.to_bits()[:, None], guessed)
    if max_weight is None:
        max_weight = ell
    return _recover_row(prob, 0, make_rng(rng), max_iters, max_weight)


def recover_private_key(pk: PublicKey, guessed, rng=None, max_iters: int = 1000,
                        max_weight: int | str | None = None, shared: bool = False,
                        workers: int = 1) -> KeyRecovery:
    """Recover every row of ``E``.

    By default rows are attacked independently, each with its own free sets.
    With ``shared=True`` every invertible ``H_F`` is used for all rows still
    pending, which needs far fewer eliminations; ``max_iters`` then bounds the
    total number of free sets drawn.

    ``max_weight="auto"`` replaces the ``ell`` filter with
    :func:`acceptance_bound`, which tolerates random columns missing from
    ``guessed``.
    """
    ps = pk.params
    rng = make_rng(rng)
    prob = _Problem(pk.H, pk.S.to_bits(), guessed)
    if max_weight is None:
        max_weight = ps.ell
    elif max_weight == "auto":
        max_weight = acceptance_bound(prob.free_outside, ps.ell)
    kp = ps.k_prime

    if not shared:
        seeds = rng.integers(0, 2**63, size=kp)

        def work(j):
            return _recover_row(prob, j, np.random.default_rng(seeds[j]), max_iters, max_weight)

        rows: list[RowRecovery] = []
        try:
            if workers > 1:
                with ThreadPoolExecutor(workers) as pool:
                    rows = list(pool.map(work, range(kp)))
            else:
                rows = [work(j) for j in range(kp)]
        except RowNotFound as exc:
            bad = len(rows) if workers <= 1 else -1
            raise KeyRecoveryFailure(bad, str(exc)) from exc
        E = BitMatrix.from_rows([r.row for r in rows])
        return KeyRecovery(E, [r.iterations for r in rows],
                           sum(r.singular for r in rows), sum(r.iterations for r in rows))

    words = np.zeros((kp, BitVector.zeros(ps.n).words.shape[0]), dtype=np.uint64)
    iterations = np.zeros(kp, dtype=np.int64)
    pending = np.arange(kp)
    singular = 0
    for it in range(1, max_iters + 1):
        F = prob.sample(rng)
        x = prob.solve(F, pending)
        if x is None:
            singular += 1
            continue
        ok = _outside_weight(x, prob.outside_words) <= max_weight
        words[pending[ok]] = x[ok]
        iterations[pending[ok]] = it
        pending = pending[~ok]
        if pending.size == 0:
            return KeyRecovery(BitMatrix(kp, ps.n, words), iterations.tolist(), singular, it)
    raise KeyRecoveryFailure(int(pending[0]),
                             f"{pending.size} rows unrecovered after {max_iters} free sets")


@dataclass
class AttackReport:
    params: str
    N: int
    tau: int
    guessed: frozenset[int]
    iterations: list[int] = field(default_factory=list)
    samples: int = 0
    singular: int = 0
    seconds: float = 0.0
    success: bool = False
    key: BitMatrix | None = None
    error: str = ""
    key_equal: bool | None = None

    @property
    def guessed_size(self) -> int:
        return len(self.guessed)


def full_attack(pk: PublicKey, signatures: list[Signature], delta: float | None = None,
                tau: int | None = None, rng=None, max_iters: int = 5000,
                max_weight: int | str | None = "auto", shared: bool = True,
                workers: int = 1) -> AttackReport:
    """Count set bits, guess the random columns, and decode every row.

    Exactly one of ``delta`` and ``tau`` must be given. The returned report
    only carries a key when ``H E^T = S`` has been checked.
    """
    if not signatures:
        raise ValueError("need at least one signature")
    if (delta is None) == (tau is None):
        raise ValueError("give exactly one of delta and tau")
    ps = pk.params
    start = time.perf_counter()
    t = tally(signatures)
    cfg = DistinguisherConfig(tau=tau) if tau is not None else DistinguisherConfig.from_delta(t.N, delta)
    guessed = guess_random_columns(t, cfg)
    report = AttackReport(ps.name, t.N, cfg.tau, guessed)
    if len(guessed) > ps.redundancy:
        report.error = f"{len(guessed)} guessed columns exceed n - k; raise the threshold"
        report.seconds = time.perf_counter() - start
        return report
    try:
        rec = recover_private_key(pk, guessed, rng, max_iters=max_iters, max_weight=max_weight,
                                  shared=shared, workers=workers)
    except KeyRecoveryFailure as exc:
        report.error = str(exc)
        report.seconds = time.perf_counter() - start
        return report
    report.iterations = rec.iterations
    report.samples = rec.samples
    report.singular = rec.singular
    if check_key_pair(pk, rec.E):
        report.success = True
        report.key = rec.E
    else:
        report.error = "recovered matrix does not satisfy H E^T = S"
    report.seconds = time.perf_counter() - start
    return report
