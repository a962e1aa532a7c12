import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerpart.partitions import (
    StagedBuilder,
    compute_sigma_recurrence,
    compute_staged,
    iroot,
    oracle_pd,
    sigma_d,
    sigma_table,
    stage_count,
    wright_asymptotic_constant,
    zeta_alternating,
    zeta_euler_maclaurin,
)
from powerpart.series import EXACT, ModularRing


def brute_sigma(n, d):
    return sum(k**d for k in range(1, n + 1) if n % k**d == 0) if n else 0


def brute_partitions(n, d):
    """Enumerate partitions into d-th powers explicitly (tiny n only)."""
    parts = [k**d for k in range(1, n + 1) if k**d <= n]

    def rec(rest, i):
        if rest == 0:
            return 1
        if i < 0:
            return 0
        return sum(rec(rest - j * parts[i], i - 1) for j in range(rest // parts[i] + 1))

    return rec(n, len(parts) - 1)


@pytest.mark.parametrize("n,d,expected", [(0, 2, 0), (4, 2, 5), (64, 3, 73), (1, 5, 1), (32, 5, 33)])
def test_sigma_d_examples(n, d, expected):
    assert sigma_d(n, d) == expected
    assert brute_sigma(n, d) == expected


def test_sigma_table_matches_definition():
    for d in (2, 3, 4):
        table = sigma_table(d, 400)
        assert table == [brute_sigma(n, d) for n in range(401)]
        assert table[0] == 0
        assert all(1 <= table[n] <= n * sum(1 for k in range(1, n + 1) if n % k == 0)
                   for n in range(1, 401))


@pytest.mark.parametrize("n,d", [(0, 2), (1, 2), (99, 2), (100, 2), (101, 2), (999_999, 3),
                                 (1_000_000, 3), (1_000_001, 3), (10**30, 5), (2**64 - 1, 2)])
def test_iroot_exact_at_perfect_powers(n, d):
    k = iroot(n, d)
    assert k**d <= n < (k + 1) ** d


def test_stage_counts():
    assert stage_count(2, 100_000) == 316  # 316^2 <= 10^5 < 317^2
    assert stage_count(3, 1_000_000) == 100
    assert stage_count(4, 1_000_000) == 31
    assert stage_count(5, 1_000_000) == 15
    assert stage_count(7, 0) == 0


@pytest.mark.parametrize("d,n,expected", [(2, 4, 2), (2, 8, 3), (5, 31, 1), (5, 32, 2), (3, 8, 2)])
def test_oracle_examples(d, n, expected):
    assert oracle_pd(d, n) == expected
    assert brute_partitions(n, d) == expected


def test_staged_small_values(backend):
    assert compute_staged(2, 10).values == [1, 1, 1, 1, 2, 2, 2, 2, 3, 4, 4]
    for d in (2, 3, 4, 5):
        assert compute_staged(d, 0).values == [1]
    assert compute_staged(3, 20)[8] == 2


def test_sigma_recurrence_small():
    assert compute_sigma_recurrence(2, 10).values == compute_staged(2, 10).values
    for d in (2, 3, 7):
        assert compute_sigma_recurrence(d, 1).values == [1, 1]
    assert compute_sigma_recurrence(3, 100).values == [oracle_pd(3, n) for n in range(101)]


def test_sigma_recurrence_rejects_modular_ring():
    with pytest.raises(ValueError):
        compute_sigma_recurrence(2, 10, ModularRing(5))


def test_printed_summation_bounds_are_off_by_one():
    # summing i = 0..n-1 drops the sigma(n) p(0) term; it fails already at n = 1
    sig = sigma_table(2, 30)
    p = [1] + [0] * 30
    for n in range(1, 31):
        p[n] = sum(sig[i] * p[n - i] for i in range(0, n)) // n
    assert p[1] == 0 != oracle_pd(2, 1)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cross_method_equality(d, backend):
    N = 500
    staged = compute_staged(d, N).values
    assert staged == compute_sigma_recurrence(d, N).values
    assert staged == [oracle_pd(d, n) for n in range(N + 1)]


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("m", range(2, 11))
def test_ring_reduction(d, m, backend):
    exact = compute_staged(d, 500)
    assert compute_staged(d, 500, ModularRing(m)).values == [v % m for v in exact.values]


@given(d=st.integers(2, 5), n_short=st.integers(0, 300), extra=st.integers(0, 300))
@settings(max_examples=40, deadline=None)
def test_prefix_stability(d, n_short, extra):
    long = compute_staged(d, n_short + extra)
    assert compute_staged(d, n_short).values == long.values[: n_short + 1]


@pytest.mark.parametrize("d", [2, 3, 4])
def test_stage_boundary_finality(d):
    N = 700
    truth = [oracle_pd(d, n) for n in range(N + 1)]
    builder = StagedBuilder(d, N, EXACT)
    while not builder.done:
        builder.step()
        k = builder.completed
        final = builder.final_prefix()
        assert final == min(N + 1, (k + 1) ** d)
        assert builder.buf[:final] == truth[:final]
        # the weaker form n <= k^d certainly holds
        assert builder.buf[: k**d + 1] == truth[: k**d + 1]
        if final <= N:
            # the first index past the final prefix is a part k+1 missing from the product
            assert builder.buf[final] == truth[final] - 1
    assert builder.table().values == truth


def test_unfinished_builder_refuses_table():
    builder = StagedBuilder(2, 100, EXACT)
    with pytest.raises(RuntimeError):
        builder.table()


def test_table_invariants(exact_p2):
    values = exact_p2.values
    assert values[0] == values[1] == 1
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert exact_p2.method == "staged" and exact_p2.is_exact


@pytest.mark.parametrize("s", [1.1, 1.2, 1.25, 1.5, 2.0, 3.0])
def test_zeta_two_ways(s):
    a, b = zeta_euler_maclaurin(s), zeta_alternating(s)
    assert a == pytest.approx(b, rel=1e-11)
    assert a == pytest.approx(float(mpmath.zeta(s)), rel=1e-12)


def test_wright_constant():
    # frozen after agreement of both zeta evaluations and mpmath to 12 digits
    assert wright_asymptotic_constant(2) == pytest.approx(3.3074117835966517, rel=1e-12)
    for d in range(2, 11):
        mp = (d + 1) * (mpmath.gamma(1 + mpmath.mpf(1) / d) * mpmath.zeta(1 + mpmath.mpf(1) / d) / d) ** (
            mpmath.mpf(d) / (d + 1))
        assert wright_asymptotic_constant(d) == pytest.approx(float(mp), rel=1e-10)
        assert wright_asymptotic_constant(d) > 0
    with pytest.raises(ValueError):
        wright_asymptotic_constant(1)


def test_wright_constant_reduces_to_hardy_ramanujan():
    from powerpart.partitions import _wright_constant

    assert _wright_constant(1) == pytest.approx(math.pi * math.sqrt(2 / 3), rel=1e-12)
