"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures and semantics. The modular path is vectorised with numpy by
viewing the buffer as rows of length ``e``: an ascending stride update is a
running sum down each column, a descending one is a single shifted add.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"

_INT64_MAX = np.iinfo(np.int64).max


def _column_cumsum(rows: np.ndarray, m: int) -> None:
    """In-place running sum down axis 0 of ``rows``, reduced mod ``m``."""
    # chunk so that a chunk's partial sums never overflow int64
    step = max(1, _INT64_MAX // max(m, 2) - 1)
    carry = np.zeros(rows.shape[1], dtype=np.int64)
    for start in range(0, rows.shape[0], step):
        block = rows[start:start + step]
        block[0] += carry
        np.cumsum(block, axis=0, out=block)
        block %= m
        carry = block[-1].copy()


def mod_stride(c: np.ndarray, e: int, sign: int, ascending: bool, m: int) -> None:
    if e <= 0:
        raise ValueError("stride must be positive")
    size = c.shape[0]
    if e >= size:
        return
    if not ascending:
        shifted = c[:-e].copy()
        if sign > 0:
            c[e:] += shifted
        else:
            c[e:] -= shifted
        c[e:] %= m
        return
    nrows = -(-size // e)
    grid = np.zeros(nrows * e, dtype=np.int64)
    grid[:size] = c
    rows = grid.reshape(nrows, e)
    if sign > 0:
        _column_cumsum(rows, m)
    else:
        # alternating running sum: flip odd rows, accumulate, flip back
        rows[1::2] = (m - rows[1::2]) % m
        _column_cumsum(rows, m)
        rows[1::2] = (m - rows[1::2]) % m
    c[:] = grid[:size]


def exact_stride(c: list, e: int, sign: int, ascending: bool) -> None:
    if e <= 0:
        raise ValueError("stride must be positive")
    size = len(c)
    if e >= size:
        return
    if ascending:
        if sign > 0:
            for n in range(e, size):
                c[n] += c[n - e]
        else:
            for n in range(e, size):
                c[n] -= c[n - e]
    else:
        if sign > 0:
            for n in range(size - 1, e - 1, -1):
                c[n] += c[n - e]
        else:
            for n in range(size - 1, e - 1, -1):
                c[n] -= c[n - e]


def mod_convolve(f: np.ndarray, g: np.ndarray, m: int) -> np.ndarray:
    size = f.shape[0]
    if size and (m - 1) ** 2 * size < _INT64_MAX:
        return np.convolve(f, g)[:size] % m
    fl = [int(x) for x in f]
    gl = [int(x) for x in g]
    out = [sum(fl[i] * gl[n - i] for i in range(n + 1)) % m for n in range(size)]
    return np.array(out, dtype=np.int64)
