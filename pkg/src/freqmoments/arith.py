"""Elementary number theory for the congruence pipeline.

Primes, factorization, the index of Gamma0(N) in SL2(Z), half-integral
Sturm bounds, and Kronecker symbols.  Everything is exact integer
arithmetic; nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

__all__ = [
    "PrimeTable",
    "SturmConfig",
    "SHARP24",
    "CONSERVATIVE12",
    "factorize",
    "index_gamma0",
    "is_prime",
    "kronecker_symbol",
    "primes_up_to",
    "sturm_bound",
    "sturm_bound_for_level",
]

SHARP24 = "sharp24"
CONSERVATIVE12 = "conservative12"

_BOUND_MODES = (SHARP24, CONSERVATIVE12)
_LEVEL_MODELS = ("natural", "safe", "custom")


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to an inclusive limit, ascending."""

    limit: int
    primes: tuple[int, ...]

    def __contains__(self, n: object) -> bool:
        return n in set(self.primes)

    def __iter__(self):
        return iter(self.primes)


def primes_up_to(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit < 2:
        return PrimeTable(limit, ())
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            start = p * p
            sieve[start : limit + 1 : p] = bytearray(len(range(start, limit + 1, p)))
    return PrimeTable(limit, tuple(i for i, flag in enumerate(sieve) if flag))


def is_prime(n: int) -> bool:
    """Trial division; adequate for the scan ranges used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, e), ...) with ascending primes."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out: list[tuple[int, int]] = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def index_gamma0(N: int) -> int:
    """Index [SL2(Z) : Gamma0(N)] = N * prod_{p | N} (1 + 1/p).

    Computed as an exact integer: multiply the numerators first, divide once.
    """
    if N < 1:
        raise ValueError("level must be >= 1")
    num, den = N, 1
    for p, _ in factorize(N):
        num *= p + 1
        den *= p
    return num // den


@dataclass(frozen=True)
class SturmConfig:
    """Bound mode and Gamma0(4L) level model for half-integral Sturm checks.

    mode selects the divisor in B = floor(k * [SL2(Z):Gamma0(4L)] / divisor)
    with k = 2m + 1: "sharp24" divides by 24, "conservative12" by 12.  The
    conservative mode is the default because it is the one justified by
    multiplying into integral weight with a theta power; sharp24 is what the
    published ordinary-partition and filtered tables use.

    level_model resolves L from the progression prime: "natural" is L = ell,
    "safe" is L = ell**2, "custom" takes an explicit L >= 1.
    """

    mode: str = CONSERVATIVE12
    level_model: str = "safe"
    custom_level: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in _BOUND_MODES:
            raise ValueError(f"unknown bound mode {self.mode!r}")
        if self.level_model not in _LEVEL_MODELS:
            raise ValueError(f"unknown level model {self.level_model!r}")
        if self.level_model == "custom":
            if self.custom_level is None or self.custom_level < 1:
                raise ValueError("custom level model requires custom_level >= 1")
        elif self.custom_level is not None:
            raise ValueError("custom_level only makes sense with the custom model")

    def resolve_level(self, ell: int) -> int:
        if self.level_model == "natural":
            return ell
        if self.level_model == "safe":
            return ell * ell
        assert self.custom_level is not None
        return self.custom_level


def sturm_bound_for_level(m: int, mode: str, level: int) -> int:
    """B = floor(k * index_gamma0(4L) / divisor), k = 2m + 1, clamped to >= 1."""
    if m < 1 or m % 2 == 0:
        raise ValueError("weight parameter m must be odd and >= 1")
    if mode not in _BOUND_MODES:
        raise ValueError(f"unknown bound mode {mode!r}")
    if level < 1:
        raise ValueError("level must be >= 1")
    k = 2 * m + 1
    divisor = 24 if mode == SHARP24 else 12
    bound = (k * index_gamma0(4 * level)) // divisor
    return max(bound, 1)


def sturm_bound(m: int, config: SturmConfig, ell: int) -> int:
    """Half-integral Sturm bound for weight m + 1/2 at the level L(ell) the
    config resolves.  ell must be prime for the natural and safe models."""
    if config.level_model in ("natural", "safe") and not is_prime(ell):
        raise ValueError(f"ell={ell} must be prime for the {config.level_model} level model")
    return sturm_bound_for_level(m, config.mode, config.resolve_level(ell))


def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D | n), the completely multiplicative extension of
    the Legendre symbol to all integer arguments."""
    a = D
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = 0
        while n % 2 == 0:
            n //= 2
            e += 1
        # (a | 2) = +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        if e % 2 == 1 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0
