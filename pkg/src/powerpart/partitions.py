"""The counting function p_d(n): partitions of n into d-th powers.

Three independent routes:

* :func:`compute_staged`, the production path. It multiplies in the factors
  ``1/(1 - q^(k^d))`` one at a time with an in-place stride update. It works
  exactly or mod m.
* :func:`compute_sigma_recurrence`, the logarithmic-derivative recurrence
  ``n p(n) = sum_{i=1}^{n} sigma_d(i) p(n-i)``. Exact only and quadratic, so
  it is a cross-check.
* :func:`oracle_pd`, a memoised largest-part recursion sharing no code with
  the series module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .series import EXACT, CoefficientRing, TruncatedSeries

__all__ = [
    "iroot",
    "stage_count",
    "sigma_d",
    "sigma_table",
    "PartitionTable",
    "StagedBuilder",
    "compute_staged",
    "compute_sigma_recurrence",
    "oracle_pd",
    "zeta_euler_maclaurin",
    "zeta_alternating",
    "wright_asymptotic_constant",
]


def iroot(n: int, d: int) -> int:
    """Largest integer k with k**d <= n, by integer bisection."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if d < 1:
        raise ValueError("root degree must be positive")
    lo, hi = 0, 1
    while hi**d <= n:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**d <= n:
            lo = mid
        else:
            hi = mid
    return lo


def stage_count(d: int, order: int) -> int:
    """Number of staged-DP passes needed for order N: the K with K^d <= N < (K+1)^d."""
    return iroot(order, d)


def sigma_d(n: int, d: int) -> int:
    """Sum of k^d over all k >= 1 with k^d dividing n; zero for n = 0."""
    if n < 0:
        raise ValueError("sigma_d is defined for n >= 0")
    if n == 0:
        return 0
    total = 0
    k = 1
    while k**d <= n:
        if n % k**d == 0:
            total += k**d
        k += 1
    return total


def sigma_table(d: int, order: int) -> list[int]:
    """sigma_d(0..order) by sieving each k^d over its multiples."""
    table = [0] * (order + 1)
    for k in range(1, stage_count(d, order) + 1):
        e = k**d
        for n in range(e, order + 1, e):
            table[n] += e
    return table


@dataclass(frozen=True)
class PartitionTable:
    """Values p_d(0..N) in some coefficient ring, with provenance."""

    d: int
    series: TruncatedSeries
    method: str

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def ring(self) -> CoefficientRing:
        return self.series.ring

    @property
    def values(self) -> list[int]:
        return self.series.coeffs

    @property
    def is_exact(self) -> bool:
        return self.ring.modulus is None

    def __getitem__(self, n: int) -> int:
        return self.series[n]

    def __len__(self) -> int:
        return self.order + 1


class StagedBuilder:
    """Resumable staged DP.

    After stage k the buffer holds the coefficients of
    ``prod_{i<=k} 1/(1 - q^(i^d))``. Entries with index below ``(k+1)^d`` are
    then final.
    """

    def __init__(self, d: int, order: int, ring: CoefficientRing = EXACT, *,
                 buf=None, completed: int = 0):
        if d < 1:
            raise ValueError(f"d must be positive, got {d}")
        if order < 0:
            raise ValueError(f"order must be non-negative, got {order}")
        self.d = d
        self.order = order
        self.ring = ring
        self.stages = stage_count(d, order)
        if buf is None:
            if completed:
                raise ValueError("a resumed build needs its buffer")
            # stage 1 (part size 1) turns the unit series into all ones
            buf = ring.ones(order + 1)
            completed = min(1, self.stages)
        if len(buf) != order + 1:
            raise ValueError("buffer length does not match order")
        self.buf = buf
        self.completed = completed

    @property
    def done(self) -> bool:
        return self.completed >= self.stages

    def final_prefix(self) -> int:
        """Entries with index below this are final."""
        if self.done:
            return self.order + 1
        return min(self.order + 1, (self.completed + 1) ** self.d)

    def step(self) -> None:
        k = self.completed + 1
        self.ring.stride(self.buf, k**self.d, 1, True)
        self.completed = k

    def run(self, on_stage: Callable[["StagedBuilder"], None] | None = None) -> None:
        while not self.done:
            self.step()
            if on_stage is not None:
                on_stage(self)

    def table(self) -> PartitionTable:
        if not self.done:
            raise RuntimeError(f"build stopped at stage {self.completed} of {self.stages}")
        return PartitionTable(self.d, TruncatedSeries._wrap(self.ring, self.buf), "staged")


def compute_staged(d: int, order: int, ring: CoefficientRing = EXACT) -> PartitionTable:
    """p_d(0..order) via successive sparse updates, one per part size k^d."""
    builder = StagedBuilder(d, order, ring)
    builder.run()
    return builder.table()


def compute_sigma_recurrence(d: int, order: int,
                             ring: CoefficientRing = EXACT) -> PartitionTable:
    """p_d(0..order) from ``n p(n) = sum_{i=1}^{n} sigma_d(i) p(n-i)``.

    The recurrence divides by n, so only the exact ring is accepted.
    """
    if ring.modulus is not None:
        raise ValueError("the sigma recurrence needs the exact ring")
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    sig = sigma_table(d, order)
    p = [1] + [0] * order
    for n in range(1, order + 1):
        acc = sum(sig[i] * p[n - i] for i in range(1, n + 1))
        q, r = divmod(acc, n)
        if r:
            raise ArithmeticError(f"sigma recurrence not integral at n={n}")
        p[n] = q
    return PartitionTable(d, TruncatedSeries(EXACT, p), "sigma")


def oracle_pd(d: int, n: int) -> int:
    """Count partitions of n into d-th powers by largest-part recursion."""
    if n < 0:
        return 0
    return _oracle_count(d, n, iroot(n, d))


@lru_cache(maxsize=None)
def _oracle_count(d: int, n: int, kmax: int) -> int:
    # partitions of n into parts from {1^d, ..., kmax^d}
    if n < 0:
        return 0
    if n == 0 or kmax <= 1:
        return 1
    return _oracle_count(d, n, kmax - 1) + _oracle_count(d, n - kmax**d, kmax)


# Bernoulli numbers B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330,
)


def zeta_euler_maclaurin(s: float, cutoff: int = 20) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin summation."""
    if s <= 1:
        raise ValueError("zeta is evaluated here only for s > 1")
    n = cutoff
    total = math.fsum(k**-s for k in range(1, n))
    total += n ** (1 - s) / (s - 1) + 0.5 * n**-s
    rising = s  # s (s+1) ... (s+2j-2)
    fact = 2.0  # (2j)!
    for j, b in enumerate(_BERNOULLI_EVEN, start=1):
        total += b / fact * rising * n ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return total


def zeta_alternating(s: float, terms: int = 40) -> float:
    """Riemann zeta for real s > 1 via the accelerated alternating eta series."""
    if s <= 1:
        raise ValueError("zeta is evaluated here only for s > 1")
    n = terms
    # Borwein's weights d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    dk = []
    acc = 0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4**i // (math.factorial(n - i) * math.factorial(2 * i))
        dk.append(n * acc)
    dn = dk[-1]
    eta = -math.fsum((-1) ** k * (dk[k] - dn) / (k + 1) ** s for k in range(n)) / dn
    return eta / (1 - 2 ** (1 - s))


def wright_asymptotic_constant(d: int) -> float:
    """The constant c_d with log p_d(n) ~ c_d n^(1/(d+1)).

    c_d = (d+1) ((1/d) Gamma(1+1/d) zeta(1+1/d))^(d/(d+1)). At d = 1 this is
    pi sqrt(2/3), the Hardy-Ramanujan constant, which fixes the exponent of n.
    """
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    return _wright_constant(d)


def _wright_constant(d: int) -> float:
    inner = math.gamma(1 + 1 / d) * zeta_euler_maclaurin(1 + 1 / d) / d
    return (d + 1) * inner ** (d / (d + 1))
