"""Statistical separation of random and identity columns from signatures.

A bit of ``z`` over a random column of ``E`` is set with probability 1/2, a
bit over an identity column with a much smaller probability ``rho_I``.
Counting set bits over ``N`` signatures and thresholding the counts reveals
the set of random columns.

Exact binomial tails are evaluated with mpmath; confidence levels for small
``N`` are far below the smallest positive double.

Two conventions exist for the confidence level. The exact one is the
probability that the rule ``mu_i > floor(delta N)`` labels every column
correctly. The conservative one (the default, and the one behind the
published confidence table) also counts a random column whose count equals
``ceil(delta N)`` as an error, so it lower-bounds the exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .params import ParameterSet
from .scheme import Signature, signatures_to_bits

_DPS = 60


def _as_fraction(x) -> Fraction:
    # decimal literals such as 0.3 are meant exactly, not as their binary float
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _floor_scaled(N: int, delta) -> int:
    return math.floor(N * _as_fraction(delta))


def _ceil_scaled(N: int, delta) -> int:
    return math.ceil(N * _as_fraction(delta))


@dataclass(frozen=True)
class BitTally:
    """Per-position counts ``mu_i`` of set bits over ``N`` signatures."""

    N: int
    counts: np.ndarray

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.N

    def __add__(self, other: BitTally) -> BitTally:
        if other.n != self.n:
            raise ValueError("tallies cover different lengths")
        return BitTally(self.N + other.N, self.counts + other.counts)


def tally_bits(z_bits: np.ndarray) -> BitTally:
    z_bits = np.asarray(z_bits)
    if z_bits.ndim != 2 or z_bits.shape[0] == 0:
        raise ValueError("need a non-empty (N, n) array of signature bits")
    return BitTally(z_bits.shape[0], z_bits.sum(axis=0, dtype=np.int64))


def tally(signatures: list[Signature]) -> BitTally:
    if not signatures:
        raise ValueError("no signatures to tally")
    n = signatures[0].z.length
    if any(s.z.length != n for s in signatures):
        raise ValueError("signatures have different lengths")
    return tally_bits(signatures_to_bits(signatures))


@dataclass(frozen=True)
class DistinguisherConfig:
    """Classify ``i`` as a random column iff ``mu_i > tau``."""

    tau: int
    delta: float | None = None

    @classmethod
    def from_delta(cls, N: int, delta: float) -> DistinguisherConfig:
        if not 0 < delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
        return cls(tau=_floor_scaled(N, delta), delta=delta)


def guess_random_columns(t: BitTally, cfg: DistinguisherConfig) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(t.counts > cfg.tau))


# closed forms


def rho_identity_exact(ps: ParameterSet) -> Fraction:
    a = Fraction(ps.w1, ps.k_prime)
    return a + Fraction(ps.w2, ps.n) * (1 - 2 * a)


def column_probabilities(ps: ParameterSet) -> tuple[float, float]:
    """``(rho_R, rho_I)``: probability that a signature bit is set over a
    random, respectively identity, column."""
    return 0.5, float(rho_identity_exact(ps))


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, float):
        x = _as_fraction(x)
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _eps_random_mp(N: int, delta, include_ceiling=False):
    top = _ceil_scaled(N, delta) if include_ceiling else _floor_scaled(N, delta)
    total = sum(math.comb(N, u) for u in range(0, max(top, -1) + 1))
    return mpmath.mpf(total) / mpmath.mpf(2) ** N


def _eps_identity_mp(N: int, delta, rho):
    lo = max(_ceil_scaled(N, delta), 0)
    rho = _mpf(rho)
    if rho == 0:
        return mpmath.mpf(0) if lo > 0 else mpmath.mpf(1)
    q = 1 - rho
    return mpmath.fsum(math.comb(N, u) * rho**u * q ** (N - u) for u in range(lo, N + 1))


def epsilon_random(N: int, delta, include_ceiling: bool = False) -> float:
    """Probability that a random column's count is at most ``floor(delta N)``
    (``ceil(delta N)`` with ``include_ceiling``)."""
    if N < 1:
        raise ValueError("N must be positive")
    with mpmath.workdps(_DPS):
        return float(_eps_random_mp(N, delta, include_ceiling))


def epsilon_identity(N: int, delta, rho_I) -> float:
    """Probability that an identity column's count is at least ``ceil(delta N)``."""
    if N < 1:
        raise ValueError("N must be positive")
    with mpmath.workdps(_DPS):
        return float(_eps_identity_mp(N, delta, rho_I))


def log_confidence_level(N: int, delta, ps: ParameterSet, conservative: bool = True) -> float:
    """Natural log of the probability that every column is classified correctly."""
    if N < 1:
        raise ValueError("N must be positive")
    with mpmath.workdps(_DPS):
        eR = _eps_random_mp(N, delta, include_ceiling=conservative)
        eI = _eps_identity_mp(N, delta, rho_identity_exact(ps))
        if eR >= 1 or eI >= 1:
            return -math.inf
        log_alpha = ps.n_random * mpmath.log1p(-eR) + ps.n_identity * mpmath.log1p(-eI)
        return float(log_alpha)


def confidence_level(N: int, delta, ps: ParameterSet, conservative: bool = True) -> float:
    """``(1 - eps_R)^(ell (n'-k')) (1 - eps_I)^(ell k')``; may underflow to 0.0,
    use :func:`log_confidence_level` for tiny values."""
    return math.exp(log_confidence_level(N, delta, ps, conservative))


def chernoff_epsilons(N: int, delta: float, rho_I: float) -> tuple[float, float]:
    """Chernoff upper bounds on the two misclassification probabilities."""
    if not rho_I < delta < 0.5:
        raise ValueError(f"need rho_I < delta < 1/2, got rho_I={rho_I}, delta={delta}")
    eR = math.exp(-((1 - 2 * delta) ** 2) * N / 4)
    eI = math.exp(-((delta - rho_I) ** 2) * N / (delta + rho_I))
    return eR, eI


def min_signatures_real(alpha_star: float, delta: float, ps: ParameterSet) -> float:
    rho = float(rho_identity_exact(ps))
    if not 0 < alpha_star < 1:
        raise ValueError("alpha* must lie in (0, 1)")
    if not rho < delta < 0.5:
        raise ValueError(f"bound undefined unless rho_I = {rho:.6f} < delta < 1/2 (delta = {delta})")
    a = 4 / (1 - 2 * delta) ** 2 * math.log(2 * ps.n_random / (1 - alpha_star))
    b = (delta + rho) / (delta - rho) ** 2 * math.log(2 * ps.n_identity / (1 - alpha_star))
    return max(a, b)


def min_signatures(alpha_star: float, delta: float, ps: ParameterSet) -> int:
    """Chernoff-derived number of signatures guaranteeing confidence ``alpha_star``."""
    return math.ceil(min_signatures_real(alpha_star, delta, ps))


def nstar_optimal_delta(alpha_star: float, ps: ParameterSet) -> float:
    """The threshold in ``(rho_I, 1/2)`` that minimizes the signature bound."""
    from scipy.optimize import minimize_scalar

    rho = float(rho_identity_exact(ps))
    eps = 1e-9
    res = minimize_scalar(lambda d: min_signatures_real(alpha_star, d, ps),
                          bounds=(rho + eps, 0.5 - eps), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def balanced_delta(ps: ParameterSet) -> Fraction:
    """Average of ``rho_I`` and ``rho_R`` weighted by how many columns of each kind exist."""
    return (Fraction(ps.n_identity, ps.n) * rho_identity_exact(ps)
            + Fraction(ps.n_random, ps.n) * Fraction(1, 2))


def experimental_threshold(ps: ParameterSet, N: int) -> int:
    """Integer cutoff ``floor(N * balanced_delta)``."""
    if N < 1:
        raise ValueError("N must be positive")
    return math.floor(N * balanced_delta(ps))


def threshold_candidates(N: int, ps: ParameterSet) -> list[float]:
    """One representative ``delta`` per distinct cutoff, strictly inside ``(rho_I, 1/2)``.

    ``(t + 1/2) / N`` has ``floor = t`` and ``ceil = t + 1``, so it realizes
    the rule ``mu > t`` exactly.
    """
    rho = rho_identity_exact(ps)
    out = []
    for t in range(0, N):
        d = Fraction(2 * t + 1, 2 * N)
        if rho < d < Fraction(1, 2):
            out.append(float(d))
    return out


def optimal_delta(N: int, ps: ParameterSet, conservative: bool = True) -> float:
    """The threshold maximizing :func:`confidence_level` for ``N`` signatures."""
    cands = threshold_candidates(N, ps)
    if not cands:
        raise ValueError(f"no admissible threshold for N = {N}")
    scores = [log_confidence_level(N, d, ps, conservative) for d in cands]
    return cands[int(np.argmax(scores))]


@dataclass(frozen=True)
class TheoryReport:
    N: int
    delta: float
    rho_R: float
    rho_I: float
    eps_R: float
    eps_I: float
    eps_R_bound: float
    eps_I_bound: float
    alpha: float
    log_alpha: float
    alpha_exact: float
    alpha_star: float
    n_star: int


def theory_report(N: int, delta: float, ps: ParameterSet, alpha_star: float = 0.9) -> TheoryReport:
    rho_R, rho_I = column_probabilities(ps)
    bR, bI = chernoff_epsilons(N, delta, rho_I)
    la = log_confidence_level(N, delta, ps)
    return TheoryReport(
        N=N, delta=delta, rho_R=rho_R, rho_I=rho_I,
        eps_R=epsilon_random(N, delta), eps_I=epsilon_identity(N, delta, rho_identity_exact(ps)),
        eps_R_bound=bR, eps_I_bound=bI, alpha=math.exp(la), log_alpha=la,
        alpha_exact=confidence_level(N, delta, ps, conservative=False),
        alpha_star=alpha_star, n_star=min_signatures(alpha_star, delta, ps),
    )


def simulate_counts(ps: ParameterSet, N: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw tallies under the independent Bernoulli model.

    Returns ``(random_counts, identity_counts)``.
    """
    rho = float(rho_identity_exact(ps))
    return (rng.binomial(N, 0.5, size=ps.n_random),
            rng.binomial(N, rho, size=ps.n_identity))
