"""Experiments over a table of p_d(n): residue counts, AP congruences, thresholds.

Residue histograms count every index n in 0..N inclusive, so each row sums
to N + 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .partitions import PartitionTable, wright_asymptotic_constant

__all__ = [
    "ResidueHistogram",
    "ApCongruenceCandidate",
    "ThresholdReport",
    "KNOWN_THRESHOLDS",
    "residue_array",
    "residue_histogram",
    "histogram_grid",
    "search_ap_congruences",
    "ap_table_order",
    "convexity_scan",
    "logconcavity_scan",
    "threshold_scan",
    "asymptotic_ratio",
]

# (kind, d) -> holds-from values on record; d=2 log-concavity has two of them
KNOWN_THRESHOLDS: dict[tuple[str, int], tuple[int, ...]] = {
    ("convex", 2): (379,),
    ("convex", 3): (6769,),
    ("convex", 4): (239603,),
    ("logconcave", 2): (1086, 1042),
    ("logconcave", 3): (15656,),
    ("logconcave", 4): (637855,),
}


def _ensure_modulus(table: PartitionTable, m: int) -> None:
    if m < 2:
        raise ValueError(f"modulus must be at least 2, got {m}")
    tm = table.ring.modulus
    if tm is not None and tm % m:
        raise ValueError(f"table is stored mod {tm}, which is not a multiple of {m}")


def residue_array(table: PartitionTable, m: int) -> np.ndarray:
    """p_d(n) mod m for n = 0..N as an int64 array."""
    _ensure_modulus(table, m)
    buf = table.series._buf
    if isinstance(buf, np.ndarray):
        return buf % m
    return np.fromiter((v % m for v in buf), dtype=np.int64, count=len(buf))


@dataclass(frozen=True)
class ResidueHistogram:
    d: int
    order: int
    modulus: int
    counts: tuple[int, ...]
    first_index: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts)


def residue_histogram(table: PartitionTable, m: int) -> ResidueHistogram:
    """Count n in 0..N by the residue of p_d(n) mod m."""
    counts = np.bincount(residue_array(table, m), minlength=m)
    return ResidueHistogram(table.d, table.order, m, tuple(int(c) for c in counts))


def histogram_grid(table: PartitionTable, moduli: Iterable[int] = range(2, 11)) -> list[ResidueHistogram]:
    return [residue_histogram(table, m) for m in moduli]


@dataclass(frozen=True)
class ApCongruenceCandidate:
    d: int
    m: int
    r: int
    a: int
    b: int
    checked: int


def ap_table_order(a_max: int, checks: int) -> int:
    """Smallest table order covering a*n + b for all a <= a_max, b < a, n < checks."""
    return a_max * checks - 1


def _scan_modulus(residues: np.ndarray, d: int, m: int, a_values: Sequence[int],
                  checks: int) -> list[ApCongruenceCandidate]:
    found = []
    for a in a_values:
        # row n, column b holds the residue at index a*n + b
        block = residues[: a * checks].reshape(checks, a)
        constant = np.flatnonzero((block == block[0]).all(axis=0))
        for b in constant:
            found.append(ApCongruenceCandidate(d, m, int(block[0, b]), a, int(b), checks))
    return found


def search_ap_congruences(table: PartitionTable, a_values: Iterable[int] = range(2, 1000),
                          checks: int = 101, moduli: Iterable[int] = range(2, 14), *,
                          jobs: int = 1) -> list[ApCongruenceCandidate]:
    """All (m, r, a, b) with p_d(a n + b) = r mod m for n = 0..checks-1.

    ``b`` runs over 0..a-1 for every ``a``.
    """
    a_values = sorted(set(a_values))
    moduli = list(moduli)
    if not a_values:
        return []
    if a_values[0] < 2:
        raise ValueError("a must be at least 2")
    if checks < 1:
        raise ValueError("checks must be positive")
    needed = ap_table_order(a_values[-1], checks)
    if table.order < needed:
        raise ValueError(f"table order {table.order} is too short; need {needed}")
    work = [(residue_array(table, m), table.d, m, a_values, checks) for m in moduli]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_modulus, *zip(*work)))
    else:
        results = [_scan_modulus(*w) for w in work]
    return [c for chunk in results for c in chunk]


@dataclass(frozen=True)
class ThresholdReport:
    d: int
    kind: str
    scan_bound: int
    last_violation: int | None
    violations: int

    @property
    def holds_from(self) -> int:
        return 1 if self.last_violation is None else self.last_violation + 1

    def known_values(self) -> tuple[int, ...]:
        return KNOWN_THRESHOLDS.get((self.kind, self.d), ())

    def note(self) -> str:
        known = self.known_values()
        if not known:
            return "no recorded value"
        if len(known) == 1:
            verdict = "matches" if self.holds_from == known[0] else "differs from"
            return f"{verdict} recorded value {known[0]}"
        matched = [k for k in known if k == self.holds_from]
        others = [k for k in known if k != self.holds_from]
        head = f"matches {matched[0]}" if matched else "matches none"
        return f"conflicting recorded values {list(known)}; {head}; differs from {others}"

    def to_line(self) -> str:
        last = "none" if self.last_violation is None else self.last_violation
        return (f"d={self.d} kind={self.kind} scan_bound={self.scan_bound} "
                f"last_violation={last} holds_from={self.holds_from} "
                f"violations={self.violations} note=\"{self.note()}\"")


def _violates(kind: str, d: int, prev: int, cur: int, nxt: int, n: int) -> bool:
    nd = n**d
    if kind == "convex":
        # 2 p(n) <= (p(n-1) + p(n+1)) (1 - 1/n^d)
        return 2 * cur * nd > (prev + nxt) * (nd - 1)
    # p(n)^2 >= p(n-1) p(n+1) (1 + 1/n^d)
    return cur * cur * nd < prev * nxt * (nd + 1)


def _scan_range(kind: str, d: int, window: Sequence[int], first: int) -> tuple[int | None, int]:
    # window[i] = p(first - 1 + i); checks n = first .. first + len(window) - 3
    last = None
    count = 0
    for i in range(1, len(window) - 1):
        n = first + i - 1
        if _violates(kind, d, window[i - 1], window[i], window[i + 1], n):
            last = n
            count += 1
    return last, count


def threshold_scan(table: PartitionTable, kind: str, *, jobs: int = 1) -> ThresholdReport:
    """Last n in 1..N-1 violating the strengthened convexity or log-concavity bound.

    Comparisons are done on cleared denominators in exact integers.
    """
    if kind not in ("convex", "logconcave"):
        raise ValueError(f"unknown scan kind {kind!r}")
    if not table.is_exact:
        raise ValueError("threshold scans need an exact table")
    if table.order < 3:
        raise ValueError("threshold scans need N >= 3")
    values = table.values
    d, N = table.d, table.order
    # shard n = 1..N-1 into ranges, each carrying one neighbour on either side
    jobs = max(1, min(jobs, N // 10_000 or 1))
    bounds = np.linspace(1, N, jobs + 1, dtype=np.int64)
    shards = [(kind, d, values[int(lo) - 1:int(hi) + 1], int(lo))
              for lo, hi in zip(bounds[:-1], bounds[1:])]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_range, *zip(*shards)))
    else:
        parts = [_scan_range(*s) for s in shards]
    lasts = [p[0] for p in parts if p[0] is not None]
    return ThresholdReport(d, kind, N, max(lasts) if lasts else None, sum(p[1] for p in parts))


def convexity_scan(table: PartitionTable) -> ThresholdReport:
    return threshold_scan(table, "convex")


def logconcavity_scan(table: PartitionTable) -> ThresholdReport:
    return threshold_scan(table, "logconcave")


def asymptotic_ratio(table: PartitionTable, points: Iterable[int]) -> list[tuple[int, float]]:
    """log p_d(n) / (c_d n^(1/(d+1))) at each requested n; tends to 1."""
    if not table.is_exact:
        raise ValueError("the asymptotic ratio needs an exact table")
    c = wright_asymptotic_constant(table.d)
    out = []
    for n in points:
        if n <= 0:
            raise ValueError("the ratio is undefined at n = 0")
        if n > table.order:
            raise ValueError(f"n={n} is beyond the table order {table.order}")
        out.append((n, math.log(table[n]) / (c * n ** (1 / (table.d + 1)))))
    return out
