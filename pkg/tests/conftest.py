import pytest

from opspace import _kernels_py

try:
    from opspace import _kernels_cy

    _BACKENDS = {"python": _kernels_py, "cython": _kernels_cy}
except ImportError:
    _BACKENDS = {"python": _kernels_py}


@pytest.fixture(params=sorted(_BACKENDS))
def kernel_backend(request):
    """Each available kernel backend module, by name."""
    return _BACKENDS[request.param]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[str, str] = {}
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::")[-1]
            results.setdefault(name, label)
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(results):
            terminalreporter.write_line(f"{name}: {results[name]}")
