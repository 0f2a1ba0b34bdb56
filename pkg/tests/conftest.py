import numpy as np
import pytest

SEED = 20240611


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
    missing = sorted(set(range(1, 15)) - set(results))
    if missing:
        terminalreporter.write_line(f"not run or errored before reporting: {missing}")
