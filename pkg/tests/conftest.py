import numpy as np
import pytest

from dressed_doublets.quartic import QuarticConfig, extract_four_level, solve_spectrum

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def spectrum():
    """D = 4 double well, 20 levels, fixed basis frequency."""
    return solve_spectrum(QuarticConfig(4.0, 80, 1.0), 20)


@pytest.fixture(scope="session")
def extracts(spectrum):
    return {ratio: extract_four_level(spectrum, ratio) for ratio in (1.0, 0.75, 0.5)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    return pytestconfig.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(log):
        passed, detail = log[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}: {detail}")
