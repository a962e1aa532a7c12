"""Restricted and colored partitions into d-th powers, and congruences between them.

For fixed d and coprime p1, p2:

A(n)  partitions of n into parts m^d with p1 not dividing m and p2 not dividing m
B(n)  parts m^d with p2 not dividing m, each part in one of p1^d - 1 colors,
      each (value, color) pair used at most once
C(n)  as B but with unrestricted multiplicity per color
D(n)  parts m^d with m odd, each part repeated at most p2^d - 1 times

The generating functions are expanded as products (``coeffs_*``). The
``oracle_*`` functions count the same objects by recursion over part values
and never touch the series code.

A note on "distinct colored parts": the factor (1 + q^e)^c lets each of the c
colors of the value e be used independently at most once. So distinctness is
per (value, color) pair. The same value may occur once in each of several
colors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, gcd

from .series import (
    EXACT,
    CoefficientRing,
    ModularRing,
    TruncatedSeries,
    expand_product,
    mul_truncated,
    power_factor,
)

__all__ = [
    "RestrictedCountSet",
    "CongruenceReport",
    "coeffs_A",
    "coeffs_B",
    "coeffs_C",
    "coeffs_D",
    "restricted_counts",
    "oracle_A",
    "oracle_B",
    "oracle_C",
    "oracle_D",
    "crt_pair",
    "verify_thm2_part1",
    "verify_thm2_part2",
    "verify_remark_crt",
    "verify_remark_d_identity",
]

SPOT_CHECK_ORDER = 200


def _check_coprime(p1: int, p2: int) -> None:
    if p1 < 2 or p2 < 2:
        raise ValueError(f"p1 and p2 must be at least 2, got {p1}, {p2}")
    if gcd(p1, p2) != 1:
        raise ValueError(f"p1={p1} and p2={p2} are not coprime")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def coeffs_A(d: int, p1: int, p2: int, order: int,
             ring: CoefficientRing = EXACT) -> TruncatedSeries:
    _check_coprime(p1, p2)
    return expand_product(
        [
            power_factor(d, 1, scale=p1),
            power_factor(d, 1, scale=p2),
            power_factor(d, -1),
            power_factor(d, -1, scale=p1 * p2),
        ],
        ring,
        order,
    )


def coeffs_B(d: int, p1: int, p2: int, order: int,
             ring: CoefficientRing = EXACT) -> TruncatedSeries:
    _check_coprime(p1, p2)
    colors = p1**d - 1
    return expand_product(
        [power_factor(d, colors, plus=True), power_factor(d, -colors, scale=p2, plus=True)],
        ring,
        order,
    )


def coeffs_C(d: int, p1: int, p2: int, order: int,
             ring: CoefficientRing = EXACT) -> TruncatedSeries:
    _check_coprime(p1, p2)
    colors = p1**d - 1
    return expand_product(
        [power_factor(d, colors, scale=p2), power_factor(d, -colors)],
        ring,
        order,
    )


def coeffs_D(d: int, p2: int, order: int,
             ring: CoefficientRing = EXACT) -> TruncatedSeries:
    """Odd d-th powers, each repeated at most p2^d - 1 times (p2 odd)."""
    if p2 < 3 or p2 % 2 == 0:
        raise ValueError(f"p2 must be odd and at least 3, got {p2}")
    return expand_product(
        [power_factor(d, 1, scale=p2, odd_only=True), power_factor(d, -1, odd_only=True)],
        ring,
        order,
    )


@dataclass(frozen=True)
class RestrictedCountSet:
    d: int
    p1: int
    p2: int
    order: int
    A: TruncatedSeries
    B: TruncatedSeries
    C: TruncatedSeries
    D: TruncatedSeries | None = None


def restricted_counts(d: int, p1: int, p2: int, order: int,
                      ring: CoefficientRing = EXACT) -> RestrictedCountSet:
    D = coeffs_D(d, p2, order, ring) if p1 == 2 and p2 % 2 == 1 else None
    return RestrictedCountSet(
        d, p1, p2, order,
        A=coeffs_A(d, p1, p2, order, ring),
        B=coeffs_B(d, p1, p2, order, ring),
        C=coeffs_C(d, p1, p2, order, ring),
        D=D,
    )


# -- enumeration oracles -----------------------------------------------------

def _bases(n: int, d: int, keep) -> tuple[int, ...]:
    out = []
    m = 1
    while m**d <= n:
        if keep(m):
            out.append(m**d)
        m += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _weighted_count(n: int, parts: tuple[int, ...], weights: tuple[tuple[int, ...], ...]) -> int:
    # parts[i] may be used j times in weights[i][j] ways (0 beyond the tuple)
    if n == 0:
        return 1
    if not parts:
        return 0
    value, rest = parts[-1], parts[:-1]
    ways = weights[-1]
    total = 0
    for j, w in enumerate(ways):
        if j * value > n:
            break
        if w:
            total += w * _weighted_count(n - j * value, rest, weights[:-1])
    return total


def _count(n: int, parts: tuple[int, ...], mult_ways) -> int:
    weights = tuple(tuple(mult_ways(j) for j in range(n // v + 1)) for v in parts)
    return _weighted_count(n, parts, weights)


def oracle_A(d: int, p1: int, p2: int, n: int) -> int:
    _check_coprime(p1, p2)
    parts = _bases(n, d, lambda m: m % p1 and m % p2)
    return _count(n, parts, lambda j: 1)


def oracle_B(d: int, p1: int, p2: int, n: int) -> int:
    """Colored distinct parts: j copies of a value pick j distinct colors."""
    _check_coprime(p1, p2)
    colors = p1**d - 1
    parts = _bases(n, d, lambda m: m % p2)
    return _count(n, parts, lambda j: comb(colors, j))


def oracle_C(d: int, p1: int, p2: int, n: int) -> int:
    """Colored parts: j copies of a value form a multiset of colors."""
    _check_coprime(p1, p2)
    colors = p1**d - 1
    parts = _bases(n, d, lambda m: m % p2)
    return _count(n, parts, lambda j: comb(colors + j - 1, j))


def oracle_D(d: int, p2: int, n: int) -> int:
    if p2 < 3 or p2 % 2 == 0:
        raise ValueError(f"p2 must be odd and at least 3, got {p2}")
    cap = p2**d - 1
    parts = _bases(n, d, lambda m: m % 2)
    return _count(n, parts, lambda j: 1 if j <= cap else 0)


# -- congruence verification ---------------------------------------------------

@dataclass(frozen=True)
class CongruenceReport:
    statement: str
    params: dict = field(hash=False)
    order: int
    verified_up_to: int
    first_failure: int | None = None

    @property
    def ok(self) -> bool:
        return self.first_failure is None

    def to_line(self) -> str:
        fields = [f"statement={self.statement}"]
        fields += [f"{k}={v}" for k, v in self.params.items()]
        fields += [
            f"N={self.order}",
            f"verified_up_to={self.verified_up_to}",
            f"first_failure={'none' if self.first_failure is None else self.first_failure}",
            f"status={'ok' if self.ok else 'FAILED'}",
        ]
        return " ".join(fields)


def _report(statement: str, params: dict, order: int, start: int, lhs, rhs) -> CongruenceReport:
    for n in range(start, order + 1):
        if lhs[n] != rhs[n]:
            return CongruenceReport(statement, params, order, n - 1, n)
    return CongruenceReport(statement, params, order, order)


def _spot_check(build, modulus: int, order: int) -> None:
    # the modular expansion must agree with the exact one reduced mod m
    n = min(order, SPOT_CHECK_ORDER)
    exact = build(n, EXACT).reduce(modulus)
    modular = build(n, ModularRing(modulus))
    if exact != modular:
        raise RuntimeError(f"modular and exact expansions disagree mod {modulus}")


def verify_thm2_part1(d: int, p2: int, order: int, *, spot_check: bool = True) -> CongruenceReport:
    """Check A_{2,p2}(n) = B_{2,p2}(n) mod 2 for n = 0..order."""
    if p2 < 3 or p2 % 2 == 0:
        raise ValueError(f"p2 must be odd and at least 3, got {p2}")
    ring = ModularRing(2)
    if spot_check:
        _spot_check(lambda n, r: coeffs_A(d, 2, p2, n, r), 2, order)
        _spot_check(lambda n, r: coeffs_B(d, 2, p2, n, r), 2, order)
    a = coeffs_A(d, 2, p2, order, ring)
    b = coeffs_B(d, 2, p2, order, ring)
    return _report("thm2-part1", {"d": d, "p1": 2, "p2": p2}, order, 0, a, b)


def verify_thm2_part2(d: int, p1: int, p2: int, order: int, *,
                      spot_check: bool = True) -> CongruenceReport:
    """Check sum_{i<=n} A(i) C(n-i) = 0 mod p1 for n = 1..order (p1 odd prime, p1 not dividing p2)."""
    if p1 % 2 == 0 or not _is_prime(p1):
        raise ValueError(f"p1 must be an odd prime, got {p1}")
    if p2 < 2 or p2 % p1 == 0:
        raise ValueError(f"p2 must be at least 2 and not divisible by p1={p1}, got {p2}")
    if order < 1:
        raise ValueError("the congruence is stated for n >= 1; order must be at least 1")
    ring = ModularRing(p1)

    def product(n, r):
        return mul_truncated(coeffs_A(d, p1, p2, n, r), coeffs_C(d, p1, p2, n, r))

    if spot_check:
        _spot_check(product, p1, order)
    conv = product(order, ring)
    zero = [0] * (order + 1)
    return _report("thm2-part2", {"d": d, "p1": p1, "p2": p2}, order, 1, conv, zero)


def crt_pair(p1: int, p2: int) -> tuple[int, int]:
    """The idempotents (a, b) mod p1*p2: a = 1, b = 0 mod p1 and a = 0, b = 1 mod p2."""
    if gcd(p1, p2) != 1:
        raise ValueError(f"{p1} and {p2} are not coprime")
    m = p1 * p2
    a = p2 * pow(p2, -1, p1) % m
    b = p1 * pow(p1, -1, p2) % m
    return a, b


def verify_remark_crt(d: int, p1: int, p2: int, order: int, *,
                      spot_check: bool = True) -> CongruenceReport:
    """Check A_{p1,p2} C_{p1,p2} C_{p2,p1} = a C_{p2,p1} + b C_{p1,p2} mod p1 p2, n = 0..order."""
    for p in (p1, p2):
        if p % 2 == 0 or not _is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    if p1 == p2:
        raise ValueError("p1 and p2 must be distinct")
    m = p1 * p2
    a, b = crt_pair(p1, p2)

    def sides(n, r):
        A = coeffs_A(d, p1, p2, n, r)
        C12 = coeffs_C(d, p1, p2, n, r)
        C21 = coeffs_C(d, p2, p1, n, r)
        lhs = mul_truncated(mul_truncated(A, C12), C21)
        mod = r.modulus
        rhs = [(a * x + b * y) % mod if mod else a * x + b * y for x, y in zip(C21, C12)]
        return lhs, TruncatedSeries(r, rhs)

    if spot_check:
        n = min(order, SPOT_CHECK_ORDER)
        exact_l, exact_r = sides(n, EXACT)
        mod_l, mod_r = sides(n, ModularRing(m))
        if exact_l.reduce(m) != mod_l or exact_r.reduce(m) != mod_r:
            raise RuntimeError(f"modular and exact expansions disagree mod {m}")
    lhs, rhs = sides(order, ModularRing(m))
    return _report("remark-crt", {"d": d, "p1": p1, "p2": p2, "a": a, "b": b}, order, 0, lhs, rhs)


def verify_remark_d_identity(d: int, p2: int, order: int) -> CongruenceReport:
    """Check A_{2,p2}(n) = D_{p2}(n) exactly for n = 0..order."""
    a = coeffs_A(d, 2, p2, order)
    dd = coeffs_D(d, p2, order)
    return _report("remark-D-identity", {"d": d, "p1": 2, "p2": p2}, order, 0, a, dd)
