"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each workload runs once per backend and the best of ``--repeat`` wall times
is reported. Results are also checked to agree between backends.
"""

from __future__ import annotations

import argparse
import time
from contextlib import contextmanager

from powerpart import _kernels_py, kernels
from powerpart.partitions import compute_staged
from powerpart.restricted import coeffs_C
from powerpart.series import EXACT, ModularRing, TruncatedSeries, mul_truncated

NAMES = ("mod_stride", "exact_stride", "mod_convolve")


@contextmanager
def use_backend(impl):
    saved = {name: getattr(kernels, name) for name in NAMES}
    for name in NAMES:
        setattr(kernels, name, getattr(impl, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def workloads(quick: bool):
    scale = 10 if quick else 1
    ring = ModularRing(2520)
    big = 2**61 - 1
    n3, n2, nc, nv = 1_000_000 // scale, 100_000 // scale, 100_000 // scale, 5_000 // scale
    conv = TruncatedSeries(ModularRing(big), [pow(7, k, big) for k in range(nv)])
    return [
        (f"staged d=3 N={n3} mod 2520", lambda: compute_staged(3, n3, ring).values[-1]),
        (f"staged d=2 N={n2} exact", lambda: compute_staged(2, n2, EXACT).values[-1]),
        (f"product C d=2 N={nc} mod 2520", lambda: coeffs_C(2, 2, 3, nc, ring).coeffs[-1]),
        (f"convolve N={nv} mod 2^61-1", lambda: mul_truncated(conv, conv).coeffs[-1]),
    ]


def best_of(fn, repeat: int):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="shrink every workload tenfold")
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if kernels.compiled_kernels is not None:
        backends.insert(0, ("cython", kernels.compiled_kernels))
    else:
        print("compiled kernels not built; timing the fallback only")

    header = f"{'workload':32}" + "".join(f"{name:>12}" for name, _ in backends)
    print(header + ("     speedup" if len(backends) == 2 else ""))
    for label, fn in workloads(args.quick):
        times, results = [], []
        for _, impl in backends:
            with use_backend(impl):
                t, r = best_of(fn, args.repeat)
            times.append(t)
            results.append(r)
        if len(set(results)) != 1:
            raise SystemExit(f"backends disagree on {label}: {results}")
        row = f"{label:32}" + "".join(f"{t:11.3f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
