import numpy as np
import pytest

from pairgen.materials import load_material_db, omega_from_wavelength


@pytest.fixture(scope="session")
def db():
    return load_material_db()


@pytest.fixture(scope="session")
def w800():
    return float(omega_from_wavelength(800e-9))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_REPORT = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_REPORT] = []


@pytest.fixture
def report(request):
    """Record one acceptance line; all lines are repeated in the terminal summary."""
    lines = request.config.stash[_REPORT]

    def add(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        print(line)
        lines.append((number, line))
        return ok

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
