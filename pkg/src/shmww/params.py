"""Public parameter sets of the scheme."""

from __future__ import annotations

from dataclasses import dataclass


class ParameterError(ValueError):
    """A parameter set violates one of the scheme's structural constraints."""


@dataclass(frozen=True)
class ParameterSet:
    name: str
    n: int
    k: int
    n_prime: int
    k_prime: int
    ell: int
    w1: int
    w2: int
    d_gv: int
    security: int = 0

    @property
    def redundancy(self) -> int:
        """``n - k``, the number of parity-check rows."""
        return self.n - self.k

    @property
    def n_random(self) -> int:
        """Number of private-key columns coming from the random blocks."""
        return self.ell * (self.n_prime - self.k_prime)

    @property
    def n_identity(self) -> int:
        return self.ell * self.k_prime

    @property
    def weight_bound(self) -> int:
        """Largest admissible signature weight ``ell (w1 + n' - k') + w2``."""
        return self.ell * (self.w1 + self.n_prime - self.k_prime) + self.w2

    def validate(self) -> ParameterSet:
        fields = ("n", "k", "n_prime", "k_prime", "ell", "w1", "w2", "d_gv")
        for f in fields:
            if getattr(self, f) < 0 or (f not in ("w1", "w2") and getattr(self, f) == 0):
                raise ParameterError(f"{f} must be positive, got {getattr(self, f)}")
        if self.n != self.ell * self.n_prime:
            raise ParameterError(f"n = {self.n} != ell * n' = {self.ell * self.n_prime}")
        if not self.k_prime < self.n_prime:
            raise ParameterError(f"k' = {self.k_prime} must be < n' = {self.n_prime}")
        if not self.k < self.n:
            raise ParameterError(f"k = {self.k} must be < n = {self.n}")
        if self.w1 > self.k_prime:
            raise ParameterError(f"w1 = {self.w1} exceeds k' = {self.k_prime}")
        if self.w2 > self.n:
            raise ParameterError(f"w2 = {self.w2} exceeds n = {self.n}")
        if self.weight_bound > self.d_gv:
            raise ParameterError(
                f"ell (w1 + n' - k') + w2 = {self.weight_bound} > d_GV = {self.d_gv}"
            )
        return self


PARA1 = ParameterSet("para1", n=4096, k=539, n_prime=1024, k_prime=890, ell=4,
                     w1=31, w2=531, d_gv=1191, security=80)
PARA2 = ParameterSet("para2", n=8192, k=1065, n_prime=1024, k_prime=880, ell=8,
                     w1=53, w2=807, d_gv=2383, security=128)
# same shape as the worked key-structure example; too small to decode uniquely
TOY = ParameterSet("toy", n=16, k=6, n_prime=8, k_prime=4, ell=2,
                   w1=1, w2=2, d_gv=12)
# smallest set here on which the attack recovers keys exactly
SMALL = ParameterSet("small", n=256, k=64, n_prime=64, k_prime=48, ell=4,
                     w1=4, w2=24, d_gv=104)

PARAMETER_SETS = {ps.name: ps for ps in (TOY, PARA1, PARA2, SMALL)}

# one-octet identifiers used by the container format
PARAM_IDS = {"toy": 0, "para1": 1, "para2": 2, "small": 3}


def get_params(name: str) -> ParameterSet:
    try:
        return PARAMETER_SETS[name.lower().replace("-", "")]
    except KeyError:
        raise ParameterError(
            f"unknown parameter set {name!r}; choose from {sorted(PARAMETER_SETS)}"
        ) from None
