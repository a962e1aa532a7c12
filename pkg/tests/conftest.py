import math

import pytest

from powerpart import _kernels_py, kernels
from powerpart.partitions import compute_staged
from powerpart.series import ModularRing

BACKENDS = ["python"] + (["cython"] if kernels.compiled_kernels is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    impl = _kernels_py if request.param == "python" else kernels.compiled_kernels
    for name in ("mod_stride", "exact_stride", "mod_convolve"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture(scope="session")
def exact_p2():
    return compute_staged(2, 100_000)


@pytest.fixture(scope="session")
def exact_p3():
    return compute_staged(3, 100_000)


@pytest.fixture(scope="session")
def residue_tables():
    """Tables mod lcm(2..10) used for the residue-count reproductions."""
    ring = ModularRing(math.lcm(*range(2, 11)))
    return {
        (2, 100_000): compute_staged(2, 100_000, ring),
        (3, 1_000_000): compute_staged(3, 1_000_000, ring),
        (4, 1_000_000): compute_staged(4, 1_000_000, ring),
        (5, 1_000_000): compute_staged(5, 1_000_000, ring),
    }


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the criterion exercised by the test."""
    label = request.node.get_closest_marker("criterion").args[0]
    detail = {}
    yield detail
    report = getattr(request.node, "rep_call", None)
    if report is not None and report.skipped:
        status = "EXCLUDED"
    else:
        status = "FAIL" if report is None or report.failed else "PASS"
    extra = " ".join(f"{k}={v}" for k, v in detail.items())
    _ACCEPTANCE_LINES.append(f"criterion {label}: {status}" + (f" ({extra})" if extra else ""))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
