import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from subordination import QuadratureConfig, validate

settings.register_profile(
    "numerics", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numerics")


@pytest.fixture(scope="session")
def cfg():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def telegraph():
    return validate(2.0, 1.0, [(1.0, 1.0)])


@pytest.fixture(scope="session")
def wave():
    return validate(2.0)


@pytest.fixture(scope="session")
def p19():
    return validate(1.9, 1.0, [(1.5, 1.0)])


@pytest.fixture(scope="session")
def p15():
    return validate(1.5, 1.0, [(1.0, 1.0)])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
