import math

import numpy as np
import pytest

from powerpart.experiments import (
    KNOWN_THRESHOLDS,
    ThresholdReport,
    ap_table_order,
    asymptotic_ratio,
    convexity_scan,
    histogram_grid,
    logconcavity_scan,
    residue_histogram,
    search_ap_congruences,
    threshold_scan,
)
from powerpart.partitions import PartitionTable, compute_staged
from powerpart.series import EXACT, ModularRing, TruncatedSeries

from reference_counts import REFERENCE_COUNTS


def synthetic(values, d=2, modulus=None):
    ring = EXACT if modulus is None else ModularRing(modulus)
    return PartitionTable(d, TruncatedSeries(ring, values), "synthetic")


def brute_last_violation(values, d, kind):
    last = None
    for n in range(1, len(values) - 1):
        a, b, c = values[n - 1], values[n], values[n + 1]
        if kind == "convex":
            bad = 2 * b * n**d > (a + c) * (n**d - 1)
        else:
            bad = b * b * n**d < a * c * (n**d + 1)
        if bad:
            last = n
    return last


def test_histogram_small():
    table = compute_staged(2, 10)
    h = residue_histogram(table, 2)
    # p_2(0..10) = 1,1,1,1,2,2,2,2,3,4,4
    assert h.counts == (6, 5)
    assert h.total == 11
    for g in histogram_grid(table):
        assert g.total == 11


def test_histogram_table1_row2(exact_p2):
    assert residue_histogram(exact_p2, 2).counts == (50299, 49702)


def test_histogram_rejects_incompatible_modulus():
    table = compute_staged(2, 50, ModularRing(6))
    assert residue_histogram(table, 3).total == 51
    with pytest.raises(ValueError):
        residue_histogram(table, 4)
    with pytest.raises(ValueError):
        residue_histogram(table, 1)


def test_histogram_modular_equals_exact(exact_p2):
    mod = compute_staged(2, 100_000, ModularRing(2520))
    for m in range(2, 11):
        assert residue_histogram(mod, m) == residue_histogram(exact_p2, m)


@pytest.mark.parametrize("key", sorted(REFERENCE_COUNTS))
@pytest.mark.parametrize("m", [2, 3, 5])
def test_histogram_nesting(residue_tables, key, m):
    table = residue_tables[key]
    coarse = residue_histogram(table, m).counts
    fine = residue_histogram(table, 2 * m).counts
    assert tuple(fine[r] + fine[r + m] for r in range(m)) == coarse
    assert sum(coarse) == key[1] + 1


def test_ap_positive_control_finds_every_pair():
    # constant residues: every (a, b) is a candidate for every modulus dividing the table's
    table = synthetic([7] * 600, modulus=12)
    found = search_ap_congruences(table, range(2, 6), checks=101, moduli=[2, 3, 4])
    pairs = {(c.m, c.a, c.b) for c in found}
    assert pairs == {(m, a, b) for m in (2, 3, 4) for a in range(2, 6) for b in range(a)}
    assert all(c.r == 7 % c.m and c.checked == 101 for c in found)


def test_ap_planted_progression():
    rng = np.random.default_rng(3)
    values = rng.integers(0, 10**6, 2000).tolist()
    for n in range(100):
        values[7 * n + 3] = 5 * rng.integers(0, 10**5) + 2  # p(7n+3) = 2 mod 5
    found = search_ap_congruences(synthetic(values), [7], checks=100, moduli=[5])
    assert [(c.m, c.r, c.a, c.b) for c in found] == [(5, 2, 7, 3)]


def test_ap_table_too_short():
    table = compute_staged(2, 1000)
    with pytest.raises(ValueError):
        search_ap_congruences(table, range(2, 20), checks=101)
    assert ap_table_order(999, 101) == 100_898


def test_ap_d3_subset_is_empty():
    table = compute_staged(3, ap_table_order(99, 101), ModularRing(2520))
    assert search_ap_congruences(table, range(2, 100), checks=101, moduli=range(2, 11)) == []


def test_ap_parallel_matches_serial():
    table = synthetic([3] * 500, modulus=60)
    serial = search_ap_congruences(table, range(2, 5), moduli=[2, 3, 4, 5])
    parallel = search_ap_congruences(table, range(2, 5), moduli=[2, 3, 4, 5], jobs=2)
    assert serial == parallel


def test_threshold_n1_is_always_a_violation():
    # at n = 1 the convexity bound reads 2 p(1) <= 0
    table = compute_staged(2, 3)
    report = convexity_scan(table)
    assert report.last_violation is not None and report.last_violation >= 1
    assert brute_last_violation(table.values, 2, "convex") == report.last_violation


def test_threshold_scans_match_brute_force():
    for d in (2, 3):
        table = compute_staged(d, 3000)
        for kind in ("convex", "logconcave"):
            r = threshold_scan(table, kind)
            assert r.last_violation == brute_last_violation(table.values, d, kind)
            assert r.scan_bound == 3000 and r.holds_from == r.last_violation + 1


def test_threshold_sharded_matches_serial(exact_p2):
    for kind in ("convex", "logconcave"):
        assert threshold_scan(exact_p2, kind, jobs=3) == threshold_scan(exact_p2, kind)


def test_threshold_prefix_consistency(exact_p3):
    # violations recorded on a prefix are the violations of the longer scan below it
    full = logconcavity_scan(exact_p3)
    for bound in (2_000, 20_000, 50_000):
        prefix = PartitionTable(3, exact_p3.series.truncate(bound), "staged")
        r = logconcavity_scan(prefix)
        if full.last_violation < bound - 1:
            assert r.last_violation == full.last_violation
        else:
            assert r.last_violation <= full.last_violation


def test_threshold_rejects_modular_and_short_tables():
    with pytest.raises(ValueError):
        convexity_scan(compute_staged(2, 100, ModularRing(7)))
    with pytest.raises(ValueError):
        convexity_scan(compute_staged(2, 2))
    with pytest.raises(ValueError):
        threshold_scan(compute_staged(2, 10), "concave")


def test_threshold_report_notes():
    assert "matches recorded value 379" in ThresholdReport(2, "convex", 10, 378, 1).note()
    both = ThresholdReport(2, "logconcave", 10, 1085, 1).note()
    assert "conflicting" in both and "matches 1086" in both and "1042" in both
    other = ThresholdReport(2, "logconcave", 10, 1041, 1).note()
    assert "matches 1042" in other
    assert ThresholdReport(5, "convex", 10, 3, 1).note() == "no recorded value"
    assert set(KNOWN_THRESHOLDS[("logconcave", 2)]) == {1042, 1086}


def test_asymptotic_ratio(exact_p2):
    rows = asymptotic_ratio(exact_p2, [1, 100, 1000, 10_000, 100_000])
    assert rows[0] == (1, 0.0)
    ratios = [r for _, r in rows[1:]]
    assert all(0 < r < 1 for r in ratios)
    assert ratios == sorted(ratios)
    gaps = [abs(1 - r) for r in ratios]
    assert gaps == sorted(gaps, reverse=True)
    assert 0.8 < ratios[-1] < 1.1
    with pytest.raises(ValueError):
        asymptotic_ratio(exact_p2, [0])
    with pytest.raises(ValueError):
        asymptotic_ratio(compute_staged(2, 10, ModularRing(3)), [5])


def test_asymptotic_ratio_uses_big_integer_log(exact_p3):
    n = 100_000
    v = exact_p3[n]
    approx = (len(str(v)) - 1 + math.log10(int(str(v)[:15]) / 10**14)) * math.log(10)
    assert math.log(v) == pytest.approx(approx, rel=1e-12)
