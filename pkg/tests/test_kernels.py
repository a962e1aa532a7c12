import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerpart import _kernels_py, kernels

compiled = kernels.compiled_kernels
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def naive_stride(values, e, sign, ascending, m=None):
    c = list(values)
    order = range(e, len(c)) if ascending else range(len(c) - 1, e - 1, -1)
    for n in order:
        c[n] = c[n] + sign * c[n - e]
        if m is not None:
            c[n] %= m
    return c


def test_selected_implementation_is_reported():
    assert kernels.IMPLEMENTATION in ("cython", "python")
    if compiled is not None:
        assert kernels.IMPLEMENTATION == "cython"


@pytest.mark.parametrize("impl", [_kernels_py] + ([compiled] if compiled else []),
                         ids=lambda m: m.IMPLEMENTATION)
@given(
    data=st.lists(st.integers(0, 10**6), min_size=1, max_size=60),
    e=st.integers(1, 70),
    sign=st.sampled_from([1, -1]),
    ascending=st.booleans(),
    m=st.sampled_from([2, 3, 10, 2520, 2**31 - 1, 2**61 - 1]),
)
@settings(max_examples=150, deadline=None)
def test_mod_stride_matches_naive(impl, data, e, sign, ascending, m):
    buf = np.array([x % m for x in data], dtype=np.int64)
    impl.mod_stride(buf, e, sign, ascending, m)
    assert buf.tolist() == naive_stride([x % m for x in data], e, sign, ascending, m)


@pytest.mark.parametrize("impl", [_kernels_py] + ([compiled] if compiled else []),
                         ids=lambda m: m.IMPLEMENTATION)
@given(
    data=st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=60),
    e=st.integers(1, 70),
    sign=st.sampled_from([1, -1]),
    ascending=st.booleans(),
)
@settings(max_examples=150, deadline=None)
def test_exact_stride_matches_naive(impl, data, e, sign, ascending):
    buf = list(data)
    impl.exact_stride(buf, e, sign, ascending)
    assert buf == naive_stride(data, e, sign, ascending)


@pytest.mark.parametrize("impl", [_kernels_py] + ([compiled] if compiled else []),
                         ids=lambda m: m.IMPLEMENTATION)
@given(
    pair=st.integers(1, 40).flatmap(
        lambda n: st.tuples(st.lists(st.integers(0, 2**61 - 2), min_size=n, max_size=n),
                            st.lists(st.integers(0, 2**61 - 2), min_size=n, max_size=n))),
    m=st.sampled_from([2, 7, 2520, 2**61 - 1]),
)
@settings(max_examples=100, deadline=None)
def test_mod_convolve_matches_naive(impl, pair, m):
    f, g = ([x % m for x in v] for v in pair)
    expected = [sum(f[i] * g[n - i] for i in range(n + 1)) % m for n in range(len(f))]
    got = impl.mod_convolve(np.array(f, dtype=np.int64), np.array(g, dtype=np.int64), m)
    assert got.tolist() == expected


def test_zero_stride_rejected():
    with pytest.raises(ValueError):
        _kernels_py.exact_stride([1, 2], 0, 1, True)
    with pytest.raises(ValueError):
        _kernels_py.mod_stride(np.ones(3, dtype=np.int64), 0, 1, True, 5)


@needs_compiled
def test_compiled_rejects_zero_stride():
    with pytest.raises(ValueError):
        compiled.exact_stride([1, 2], 0, 1, True)


def test_fallback_cumsum_chunks_without_overflow():
    # force several chunks: the running sum of 10 residues near 2**61 overflows int64
    m = 2**61 - 1
    buf = np.full(10, m - 1, dtype=np.int64)
    expected = naive_stride(buf.tolist(), 1, 1, True, m)
    _kernels_py.mod_stride(buf, 1, 1, True, m)
    assert buf.tolist() == expected
