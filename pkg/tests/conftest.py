import numpy as np
import pytest

from posiplant import kernels


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    """Each importable kernel module in turn."""
    return kernels.available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
