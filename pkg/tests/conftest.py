import pytest
from hypothesis import HealthCheck, settings

from teamai import oring_instance, validate_instance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def oring():
    return oring_instance(0.5)


@pytest.fixture
def full_inst():
    return validate_instance(3, 1.0, [0.05, 0.15, 0.30, 0.60])


@pytest.fixture
def under_inst():
    return validate_instance(3, 1.0, [0.01, 0.2, 0.45, 0.75])


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
