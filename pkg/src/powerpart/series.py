"""Truncated power series over exact integers or integers mod m.

Series are truncated at an inclusive order ``N``: coefficients of ``q^0``
through ``q^N`` are valid and everything above is discarded. The coefficient
ring is a strategy object. Each ring owns its buffer type (a list of Python
ints for the exact ring, an ``int64`` numpy array of residues for the
modular ring), so the hot loops never branch on the ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import kernels

__all__ = [
    "CoefficientRing",
    "ExactRing",
    "ModularRing",
    "EXACT",
    "ring_for",
    "TruncatedSeries",
    "ProductFactor",
    "power_factor",
    "mul_truncated",
    "inv_truncated",
    "expand_product",
    "RingMismatchError",
    "NotInvertibleError",
]

# residues are added before reduction, so keep two of them inside int64
MAX_MODULUS = 2**62


class RingMismatchError(ValueError):
    """Operands live in different rings or have different truncation orders."""


class NotInvertibleError(ArithmeticError):
    """The constant term of a series is not a unit of the coefficient ring."""


class CoefficientRing:
    """Base class for coefficient rings. Use :data:`EXACT` or :class:`ModularRing`."""

    kind: str = ""
    modulus: int | None = None

    def zeros(self, size: int):
        raise NotImplementedError

    def from_ints(self, values: Iterable[int]):
        raise NotImplementedError

    def to_ints(self, buf) -> list[int]:
        raise NotImplementedError

    def stride(self, buf, e: int, sign: int, ascending: bool) -> None:
        raise NotImplementedError

    def convolve(self, f, g):
        raise NotImplementedError

    def inverse(self, value: int) -> int:
        raise NotImplementedError

    def ones(self, size: int):
        raise NotImplementedError

    def one(self, order: int):
        buf = self.zeros(order + 1)
        buf[0] = 1
        return buf

    def describe(self) -> str:
        return self.kind if self.modulus is None else f"{self.kind}:{self.modulus}"


@dataclass(frozen=True)
class ExactRing(CoefficientRing):
    kind: str = field(default="exact", init=False)
    modulus: None = field(default=None, init=False)

    def zeros(self, size: int) -> list[int]:
        return [0] * size

    def ones(self, size: int) -> list[int]:
        return [1] * size

    def from_ints(self, values: Iterable[int]) -> list[int]:
        return [int(v) for v in values]

    def to_ints(self, buf: list[int]) -> list[int]:
        return list(buf)

    def stride(self, buf: list[int], e: int, sign: int, ascending: bool) -> None:
        kernels.exact_stride(buf, e, sign, ascending)

    def convolve(self, f: list[int], g: list[int]) -> list[int]:
        size = len(f)
        if size == 0:
            return []
        full = np.convolve(np.array(f, dtype=object), np.array(g, dtype=object))
        return [int(v) for v in full[:size]]

    def inverse(self, value: int) -> int:
        if value not in (1, -1):
            raise NotInvertibleError(f"{value} is not a unit in the integers")
        return value


@dataclass(frozen=True)
class ModularRing(CoefficientRing):
    modulus: int
    kind: str = field(default="modular", init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.modulus, (int, np.integer)) or self.modulus < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {self.modulus!r}")
        if self.modulus >= MAX_MODULUS:
            raise ValueError(f"modulus must be below 2**62, got {self.modulus}")
        object.__setattr__(self, "modulus", int(self.modulus))

    def zeros(self, size: int) -> np.ndarray:
        return np.zeros(size, dtype=np.int64)

    def ones(self, size: int) -> np.ndarray:
        return np.ones(size, dtype=np.int64)

    def from_ints(self, values: Iterable[int]) -> np.ndarray:
        m = self.modulus
        return np.array([int(v) % m for v in values], dtype=np.int64)

    def to_ints(self, buf: np.ndarray) -> list[int]:
        return [int(v) for v in buf]

    def stride(self, buf: np.ndarray, e: int, sign: int, ascending: bool) -> None:
        kernels.mod_stride(buf, e, sign, ascending, self.modulus)

    def convolve(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return kernels.mod_convolve(
            np.ascontiguousarray(f, dtype=np.int64),
            np.ascontiguousarray(g, dtype=np.int64),
            self.modulus,
        )

    def inverse(self, value: int) -> int:
        value %= self.modulus
        if gcd(value, self.modulus) != 1:
            raise NotInvertibleError(f"{value} is not a unit mod {self.modulus}")
        return pow(value, -1, self.modulus)


EXACT = ExactRing()


def ring_for(modulus: int | None) -> CoefficientRing:
    """The exact ring for ``None``, otherwise integers mod ``modulus``."""
    return EXACT if modulus is None else ModularRing(modulus)


class TruncatedSeries:
    """Immutable coefficient vector ``c_0 .. c_N`` over a coefficient ring."""

    __slots__ = ("ring", "order", "_buf")

    def __init__(self, ring: CoefficientRing, coeffs: Sequence[int] | np.ndarray):
        buf = ring.from_ints(coeffs)
        if len(buf) == 0:
            raise ValueError("a truncated series needs at least the constant term")
        self._init(ring, buf)

    def _init(self, ring: CoefficientRing, buf) -> None:
        if isinstance(buf, np.ndarray):
            buf.setflags(write=False)
        self.ring = ring
        self.order = len(buf) - 1
        self._buf = buf

    @classmethod
    def _wrap(cls, ring: CoefficientRing, buf) -> "TruncatedSeries":
        # takes ownership of ``buf``; callers must not mutate it afterwards
        self = cls.__new__(cls)
        self._init(ring, buf)
        return self

    @classmethod
    def one(cls, ring: CoefficientRing, order: int) -> "TruncatedSeries":
        return cls._wrap(ring, ring.one(order))

    @property
    def coeffs(self) -> list[int]:
        return self.ring.to_ints(self._buf)

    def buffer_copy(self):
        """A private mutable copy of the underlying buffer."""
        return self._buf.copy() if isinstance(self._buf, np.ndarray) else list(self._buf)

    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, n: int) -> int:
        return int(self._buf[n])

    def __iter__(self) -> Iterator[int]:
        return iter(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.coeffs)))

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.order >= 8 else ""
        return f"TruncatedSeries({self.ring.describe()}, N={self.order}, [{head}{more}])"

    def reduce(self, modulus: int) -> "TruncatedSeries":
        """Reduce coefficients into the ring of integers mod ``modulus``."""
        if self.ring.modulus is not None and self.ring.modulus % modulus:
            raise RingMismatchError(
                f"cannot reduce mod {modulus} from mod {self.ring.modulus}"
            )
        return TruncatedSeries(ModularRing(modulus), self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries._wrap(self.ring, self.buffer_copy()[: order + 1])


def _check_compatible(f: TruncatedSeries, g: TruncatedSeries) -> None:
    if f.ring != g.ring:
        raise RingMismatchError(f"ring mismatch: {f.ring.describe()} vs {g.ring.describe()}")
    if f.order != g.order:
        raise RingMismatchError(f"order mismatch: {f.order} vs {g.order}")


def mul_truncated(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product of ``f`` and ``g`` truncated at their common order."""
    _check_compatible(f, g)
    return TruncatedSeries._wrap(f.ring, f.ring.convolve(f._buf, g._buf))


def inv_truncated(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of ``f`` modulo ``q^(N+1)``.

    Raises :class:`NotInvertibleError` if the constant term is not a unit.
    """
    ring = f.ring
    inv0 = ring.inverse(f[0])
    fc = f.coeffs
    g = [inv0] + [0] * f.order
    m = ring.modulus
    for n in range(1, f.order + 1):
        acc = 0
        for i in range(1, n + 1):
            if fc[i]:
                acc += fc[i] * g[n - i]
        value = -inv0 * acc
        g[n] = value % m if m is not None else value
    return TruncatedSeries(ring, g)


@dataclass(frozen=True)
class ProductFactor:
    """The factor ``prod_{n>=1} (1 - q^e(n))^power``, or ``(1 + q^e(n))^power``.

    ``exponent`` must be strictly increasing in ``n``; expansion stops at the
    first exponent above the truncation order.
    """

    exponent: Callable[[int], int]
    power: int
    plus: bool = False
    label: str = ""

    def exponents(self, order: int) -> Iterator[int]:
        n, prev = 1, 0
        while True:
            e = self.exponent(n)
            if e <= prev:
                raise ValueError(f"exponent map of {self.label or 'factor'} is not increasing")
            if e > order:
                return
            yield e
            prev = e
            n += 1


def power_factor(d: int, power: int, *, scale: int = 1, plus: bool = False,
                 odd_only: bool = False) -> ProductFactor:
    """``prod_n (1 -/+ q^((scale*n)^d))^power``, optionally over odd ``n`` only."""
    if odd_only:
        exponent = lambda n: (scale * (2 * n - 1)) ** d  # noqa: E731
    else:
        exponent = lambda n: (scale * n) ** d  # noqa: E731
    sign = "+" if plus else "-"
    base = f"{scale}*" if scale != 1 else ""
    odd = " odd" if odd_only else ""
    label = f"(1{sign}q^(({base}n)^{d}))^{power}{odd}"
    return ProductFactor(exponent, power, plus, label)


def apply_factor(buf, ring: CoefficientRing, factor: ProductFactor, order: int) -> None:
    """Multiply the mutable buffer ``buf`` in place by one product factor."""
    if factor.power == 0:
        return
    inverse = factor.power < 0
    # (1-q^e)^-1: ascending +; (1+q^e)^-1: ascending -;
    # (1+q^e): descending +;   (1-q^e): descending -
    sign = 1 if factor.plus != inverse else -1
    for e in factor.exponents(order):
        for _ in range(abs(factor.power)):
            ring.stride(buf, e, sign, inverse)


def expand_product(factors: Sequence[ProductFactor], ring: CoefficientRing,
                   order: int) -> TruncatedSeries:
    """Expand a finite list of infinite-product factors to order ``order``."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    buf = ring.one(order)
    for factor in factors:
        apply_factor(buf, ring, factor, order)
    return TruncatedSeries._wrap(ring, buf)
