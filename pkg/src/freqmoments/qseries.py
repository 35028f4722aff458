"""Truncated formal power series over pluggable coefficient rings, plus the
coefficient generators for every Euler product the moment pipeline uses.

Convention: an exponent sequence c defines the product

    A(q) = prod_{r >= 1} (1 - q^r)^(-c(r)),

so positive c(r) means 1/(1 - q^r) factors (things are being counted).
Ordinary partitions are c(r) = 1, overpartitions c(r) = 2 for odd r and 1
for even r, k-coloured partitions c(r) = k, plane partitions c(r) = r.

Truncation is a hard contract: a Series of truncation N is exact through
q^N and says nothing beyond.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

__all__ = [
    "CoefficientRing",
    "Ensemble",
    "ExponentSequence",
    "ORDINARY",
    "OVERPARTITION",
    "PLANE_PARTITION",
    "PLANE_PARTITION_DEFAULT_CAP",
    "RingMismatchError",
    "Series",
    "THETA",
    "companion_series",
    "coloured",
    "coloured_ensemble",
    "dump_series",
    "ensemble_by_name",
    "eta_power_coefficients",
    "euler_product_coefficients",
    "make_series",
    "ordinary",
    "overpartition",
    "partition_counts",
    "plane_partition",
    "r2_coefficients",
    "series_inverse",
    "series_multiply",
    "tau_coefficients",
    "theta",
]

PLANE_PARTITION_DEFAULT_CAP = 5000


class RingMismatchError(ValueError):
    """Operands live in different rings or at different truncations."""


@dataclass(frozen=True)
class CoefficientRing:
    """Z/N (modulus set), exact Z (default), or exact Q (rational=True)."""

    modulus: int | None = None
    rational: bool = False

    def __post_init__(self) -> None:
        if self.modulus is not None:
            if self.rational:
                raise ValueError("a ring is either modular or rational, not both")
            if self.modulus < 2:
                raise ValueError("modulus must be >= 2")

    @classmethod
    def integers_mod(cls, n: int) -> CoefficientRing:
        return cls(modulus=n)

    @classmethod
    def exact_integers(cls) -> CoefficientRing:
        return cls()

    @classmethod
    def exact_rationals(cls) -> CoefficientRing:
        return cls(rational=True)

    @property
    def zero(self):
        return Fraction(0) if self.rational else 0

    @property
    def one(self):
        return Fraction(1) if self.rational else 1

    def reduce(self, x):
        """Coerce x into a canonical ring element."""
        if self.rational:
            return Fraction(x)
        value = operator.index(x)
        return value % self.modulus if self.modulus is not None else value

    def is_unit(self, x) -> bool:
        if self.rational:
            return x != 0
        if self.modulus is not None:
            return gcd(operator.index(x), self.modulus) == 1
        return x in (1, -1)

    def invert(self, x):
        if not self.is_unit(x):
            raise ValueError(f"{x!r} is not a unit in {self.describe()}")
        if self.rational:
            return Fraction(1) / Fraction(x)
        if self.modulus is not None:
            return pow(operator.index(x), -1, self.modulus)
        return x

    def describe(self) -> str:
        if self.rational:
            return "Q"
        if self.modulus is not None:
            return f"Z/{self.modulus}"
        return "Z"


@dataclass(frozen=True)
class Series:
    """Coefficient table a(0..n_max) in a fixed ring."""

    ring: CoefficientRing
    coeffs: tuple

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a series has at least the constant coefficient")

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)


def make_series(ring: CoefficientRing, values) -> Series:
    """Build a Series, reducing every entry into the ring."""
    return Series(ring, tuple(ring.reduce(v) for v in values))


def _check_compatible(a: Series, b: Series) -> None:
    if a.ring != b.ring:
        raise RingMismatchError(f"rings differ: {a.ring.describe()} vs {b.ring.describe()}")
    if a.n_max != b.n_max:
        raise RingMismatchError(f"truncations differ: {a.n_max} vs {b.n_max}")


# ---------------------------------------------------------------------------
# Exponent sequences and ensembles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentSequence:
    """Periodic rule c(r) = values[r mod period] * r**power_factor.

    Only integer exponents are supported; rational c(r) is deliberately
    unimplemented.
    """

    name: str
    period: int
    values: tuple[int, ...]
    power_factor: int = 0

    def __post_init__(self) -> None:
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if len(self.values) != self.period:
            raise ValueError("need exactly one value per residue class")
        if not all(isinstance(v, int) for v in self.values):
            raise TypeError("exponent values must be integers (rational exponents unsupported)")
        if not any(self.values):
            raise ValueError("at least one value must be nonzero")
        if self.power_factor not in (0, 1):
            raise ValueError("power_factor must be 0 or 1")

    def value_at(self, r: int) -> int:
        c = self.values[r % self.period]
        return c * r if self.power_factor else c


def ordinary() -> ExponentSequence:
    """c(r) = 1: ordinary partitions, A(q) = 1/(q;q)_inf."""
    return ExponentSequence("ordinary", 1, (1,))


def coloured(k: int) -> ExponentSequence:
    """c(r) = k: partitions with k colours, A(q) = (q;q)_inf^(-k)."""
    if k < 1:
        raise ValueError("number of colours must be >= 1")
    return ExponentSequence(f"coloured({k})", 1, (k,))


def plane_partition() -> ExponentSequence:
    """c(r) = r: MacMahon's plane partitions."""
    return ExponentSequence("plane-partition", 1, (1,), power_factor=1)


def overpartition() -> ExponentSequence:
    """c(r) = 2 for odd r, 1 for even r: A(q) = (-q;q)_inf / (q;q)_inf."""
    return ExponentSequence("overpartition", 2, (1, 2))


def theta() -> ExponentSequence:
    """c(r) = 2 for odd r, -1 for even r (the theta exponent sequence)."""
    return ExponentSequence("theta", 2, (-1, 2))


@dataclass(frozen=True)
class Ensemble:
    """An Euler product together with its companion series.

    companion "self" means the companion coefficients b(n) are those of the
    product itself; "r2" supplies the explicit theta companion b(n) = r2(n).
    prefactor_alpha records the q^alpha normalization exponent for bookkeeping
    only; it never enters coefficient arithmetic.
    """

    name: str
    exponents: ExponentSequence
    companion: str = "self"
    prefactor_alpha: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.companion not in ("self", "r2"):
            raise ValueError(f"unknown companion kind {self.companion!r}")


ORDINARY = Ensemble("ordinary", ordinary())
OVERPARTITION = Ensemble("overpartition", overpartition())
PLANE_PARTITION = Ensemble("plane-partition", plane_partition())
THETA = Ensemble("theta", theta(), companion="r2")


def coloured_ensemble(k: int) -> Ensemble:
    return Ensemble(f"coloured({k})", coloured(k))


def ensemble_by_name(name: str) -> Ensemble:
    """Resolve an ensemble from its CLI name, e.g. "ordinary", "coloured(3)"."""
    key = name.strip().lower()
    fixed = {
        "ordinary": ORDINARY,
        "overpartition": OVERPARTITION,
        "plane-partition": PLANE_PARTITION,
        "planepartition": PLANE_PARTITION,
        "theta": THETA,
    }
    if key in fixed:
        return fixed[key]
    if key.startswith("coloured(") and key.endswith(")"):
        return coloured_ensemble(int(key[len("coloured(") : -1]))
    if key.startswith("colored(") and key.endswith(")"):
        return coloured_ensemble(int(key[len("colored(") : -1]))
    raise ValueError(f"unknown ensemble {name!r}")


# ---------------------------------------------------------------------------
# Sparse pentagonal machinery
# ---------------------------------------------------------------------------


def _pentagonal_terms(step: int, n_max: int) -> list[tuple[int, int]]:
    """Nonconstant terms of (q^step; q^step)_inf as (exponent, sign), ascending.

    Euler: (q;q)_inf = 1 + sum_{k>=1} (-1)^k (q^{k(3k-1)/2} + q^{k(3k+1)/2}).
    """
    terms: list[tuple[int, int]] = []
    k = 1
    while True:
        g1 = step * k * (3 * k - 1) // 2
        g2 = step * k * (3 * k + 1) // 2
        if g1 > n_max:
            break
        sign = -1 if k % 2 else 1
        terms.append((g1, sign))
        if g2 <= n_max:
            terms.append((g2, sign))
        k += 1
    terms.sort()
    return terms


def _divide_by_sparse(coeffs: list, terms: list[tuple[int, int]], modulus: int | None) -> None:
    """In place: coeffs /= (1 + sum sign*q^exp).  The constant term is 1, so
    this is a subtraction recurrence and needs no ring division."""
    n_max = len(coeffs) - 1
    exps = [e for e, _ in terms]
    sgns = [s for _, s in terms]
    count = len(terms)
    for n in range(1, n_max + 1):
        acc = 0
        for i in range(count):
            e = exps[i]
            if e > n:
                break
            if sgns[i] > 0:
                acc += coeffs[n - e]
            else:
                acc -= coeffs[n - e]
        v = coeffs[n] - acc
        coeffs[n] = v % modulus if modulus is not None else v


def _multiply_by_sparse(coeffs: list, terms: list[tuple[int, int]], modulus: int | None) -> None:
    """In place: coeffs *= (1 + sum sign*q^exp).  Descending order keeps the
    referenced lower entries at their old values."""
    n_max = len(coeffs) - 1
    for n in range(n_max, 0, -1):
        acc = 0
        for e, s in terms:
            if e > n:
                break
            if s > 0:
                acc += coeffs[n - e]
            else:
                acc -= coeffs[n - e]
        v = coeffs[n] + acc
        coeffs[n] = v % modulus if modulus is not None else v


def _indicator_decomposition(c: ExponentSequence) -> dict[int, int] | None:
    """Write c(r) = sum_{d | r, d | P} m_d when c(r) depends only on gcd(r, P).

    Grouping the product over each indicator gives
    prod_r (1-q^r)^(-c(r)) = prod_d ((q^d; q^d)_inf)^(-m_d),
    which expands by sparse pentagonal passes.  Returns None when the rule
    does not have this shape.
    """
    if c.power_factor != 0:
        return None
    P = c.period
    divisors = [d for d in range(1, P + 1) if P % d == 0]
    by_gcd: dict[int, int] = {}
    for s in range(P):
        g = gcd(s, P)  # gcd(0, P) = P
        v = c.values[s]
        if by_gcd.setdefault(g, v) != v:
            return None
    multiplicity: dict[int, int] = {}
    for d in divisors:
        lower = sum(multiplicity[e] for e in divisors if e < d and d % e == 0)
        multiplicity[d] = by_gcd[d] - lower
    return {d: m for d, m in multiplicity.items() if m != 0}


def _euler_product_grouped(decomp: dict[int, int], n: int, ring: CoefficientRing) -> list:
    coeffs = [ring.zero] * (n + 1)
    coeffs[0] = ring.one
    for d in sorted(decomp):
        if d > n:
            continue
        terms = _pentagonal_terms(d, n)
        mult = decomp[d]
        for _ in range(abs(mult)):
            if mult > 0:
                _divide_by_sparse(coeffs, terms, ring.modulus)
            else:
                _multiply_by_sparse(coeffs, terms, ring.modulus)
    return coeffs


def _euler_product_factor_passes(c: ExponentSequence, n: int, ring: CoefficientRing) -> list:
    """Reference algorithm: one prefix pass per unit of |c(r)| per factor.

    Multiplying by 1/(1-q^r) is the ascending recurrence a[i] += a[i-r];
    multiplying by (1-q^r) the descending a[i] -= a[i-r].  Cost is
    O(n * sum |c(r)|), which is fine for every periodic rule at scan sizes
    but is why the grouped path above exists.
    """
    modulus = ring.modulus
    coeffs = [ring.zero] * (n + 1)
    coeffs[0] = ring.one
    for r in range(1, n + 1):
        cr = c.value_at(r)
        for _ in range(abs(cr)):
            if cr > 0:
                for i in range(r, n + 1):
                    v = coeffs[i] + coeffs[i - r]
                    coeffs[i] = v % modulus if modulus is not None else v
            else:
                for i in range(n, r - 1, -1):
                    v = coeffs[i] - coeffs[i - r]
                    coeffs[i] = v % modulus if modulus is not None else v
    return coeffs


def _euler_product_linear_rule(c: ExponentSequence, n: int, ring: CoefficientRing) -> list:
    """Rules with the extra factor r (plane partitions) via the logarithmic
    derivative recurrence n*b(n) = sum_d sigma_c1(d) b(n-d), run over exact
    integers so the division by n is exact, then reduced into the ring."""
    sigma1 = [0] * (n + 1)
    for r in range(1, n + 1):
        w = c.value_at(r) * r
        if w == 0:
            continue
        for i in range(r, n + 1, r):
            sigma1[i] += w
    b = [0] * (n + 1)
    b[0] = 1
    for i in range(1, n + 1):
        total = 0
        for d in range(1, i + 1):
            s = sigma1[d]
            if s:
                total += s * b[i - d]
        q, rem = divmod(total, i)
        if rem:
            raise ArithmeticError("non-integral coefficient; exponent rule is inconsistent")
        b[i] = q
    return [ring.reduce(v) for v in b]


def euler_product_coefficients(
    c: ExponentSequence,
    n: int,
    ring: CoefficientRing,
    *,
    allow_large: bool = False,
) -> Series:
    """Coefficients of prod_{r=1..n} (1 - q^r)^(-c(r)) through q^n.

    Rules whose value depends only on gcd(r, period) are grouped into
    eta-type factors and expanded by sparse pentagonal passes in
    O(n^1.5 * sum |m_d|); other periodic rules run the factor-at-a-time
    reference passes.  Rules carrying the linear factor r grow
    quadratically expensive and are capped at n = 5000 unless allow_large.
    """
    if n < 0:
        raise ValueError("truncation must be >= 0")
    if c.power_factor == 1:
        if n > PLANE_PARTITION_DEFAULT_CAP and not allow_large:
            raise ValueError(
                f"linear exponent rules are capped at N={PLANE_PARTITION_DEFAULT_CAP}; "
                "pass allow_large=True to override"
            )
        coeffs = _euler_product_linear_rule(c, n, ring)
    else:
        decomp = _indicator_decomposition(c)
        if decomp is not None:
            coeffs = _euler_product_grouped(decomp, n, ring)
        else:
            coeffs = _euler_product_factor_passes(c, n, ring)
    return Series(ring, tuple(coeffs))


# ---------------------------------------------------------------------------
# Named generators
# ---------------------------------------------------------------------------


def partition_counts(n: int, ring: CoefficientRing) -> Series:
    """p(0..n) by Euler's pentagonal number recurrence."""
    if n < 0:
        raise ValueError("truncation must be >= 0")
    modulus = ring.modulus
    p = [0] * (n + 1)
    p[0] = 1
    for i in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > i:
                break
            g2 = k * (3 * k + 1) // 2
            if k % 2:
                total += p[i - g1]
                if g2 <= i:
                    total += p[i - g2]
            else:
                total -= p[i - g1]
                if g2 <= i:
                    total -= p[i - g2]
            k += 1
        p[i] = total % modulus if modulus is not None else total
    if ring.rational:
        return make_series(ring, p)
    return Series(ring, tuple(p))


def eta_power_coefficients(k: int, n: int, ring: CoefficientRing) -> Series:
    """Coefficients of (q;q)_inf^k, i.e. the Euler product with c(r) = -k."""
    if n < 0:
        raise ValueError("truncation must be >= 0")
    if k == 0:
        return Series(ring, tuple([ring.one] + [ring.zero] * n))
    rule = ExponentSequence(f"eta-power({k})", 1, (-k,))
    return euler_product_coefficients(rule, n, ring)


def tau_coefficients(n: int, ring: CoefficientRing) -> Series:
    """Ramanujan tau(1..n) read off q*(q;q)_inf^24, with a(0) = 0."""
    if n < 1:
        raise ValueError("need n >= 1 for tau")
    eta24 = eta_power_coefficients(24, n - 1, ring)
    return Series(ring, (ring.zero,) + eta24.coeffs)


def r2_coefficients(n: int) -> Series:
    """r2(0..n): lattice points on x^2 + y^2 = m, by direct counting."""
    if n < 0:
        raise ValueError("truncation must be >= 0")
    counts = [0] * (n + 1)
    for x in range(-isqrt(n), isqrt(n) + 1):
        rem = n - x * x
        for y in range(-isqrt(rem), isqrt(rem) + 1):
            counts[x * x + y * y] += 1
    return Series(CoefficientRing.exact_integers(), tuple(counts))


def companion_series(ensemble: Ensemble, n: int, ring: CoefficientRing, *, allow_large: bool = False) -> Series:
    """The companion coefficients b(0..n) for an ensemble, in the given ring."""
    if ensemble.companion == "self":
        return euler_product_coefficients(ensemble.exponents, n, ring, allow_large=allow_large)
    r2 = r2_coefficients(n)
    return make_series(ring, r2.coeffs)


# ---------------------------------------------------------------------------
# Series arithmetic
# ---------------------------------------------------------------------------


def _convolve_mod(a: tuple, b: tuple, modulus: int) -> list:
    """Truncated Cauchy product in Z/modulus via int64 convolution when safe."""
    n = len(a)
    if (modulus - 1) ** 2 * n < 2**62:
        arr = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
        return [int(v) % modulus for v in arr[:n]]
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(n - i):
            out[i + j] = (out[i + j] + ai * b[j]) % modulus
    return out


def series_multiply(a: Series, b: Series) -> Series:
    """Truncated Cauchy product; both factors must share ring and truncation."""
    _check_compatible(a, b)
    n = a.n_max
    if a.ring.modulus is not None:
        return Series(a.ring, tuple(_convolve_mod(a.coeffs, b.coeffs, a.ring.modulus)))
    out = [a.ring.zero] * (n + 1)
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        bc = b.coeffs
        for j in range(n + 1 - i):
            out[i + j] += ai * bc[j]
    return Series(a.ring, tuple(out))


def series_inverse(a: Series) -> Series:
    """Multiplicative inverse with a * a^-1 = 1 + O(q^(N+1)).

    The constant term must be a unit in the coefficient ring; otherwise the
    series is not invertible there and we refuse.
    """
    ring = a.ring
    if not ring.is_unit(a.coeffs[0]):
        raise ValueError(
            f"constant term {a.coeffs[0]!r} is not a unit in {ring.describe()}; series not invertible"
        )
    n = a.n_max
    inv0 = ring.invert(a.coeffs[0])
    out = [ring.zero] * (n + 1)
    out[0] = inv0
    modulus = ring.modulus
    for i in range(1, n + 1):
        acc = ring.zero
        for j in range(1, i + 1):
            aj = a.coeffs[j]
            if aj != 0:
                acc += aj * out[i - j]
        v = -inv0 * acc
        out[i] = v % modulus if modulus is not None else v
    return Series(ring, tuple(out))


def dump_series(series: Series, ensemble_name: str) -> str:
    """Dump format: header line, then one decimal coefficient per line."""
    lines = [f"# ring={series.ring.describe()} N={series.n_max} ensemble={ensemble_name}"]
    lines.extend(str(c) for c in series.coeffs)
    return "\n".join(lines) + "\n"
