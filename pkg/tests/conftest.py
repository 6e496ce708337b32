import pytest
from hypothesis import HealthCheck, settings

import helpers
from helpers import complete

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def triangle():
    return complete(3)


def pytest_terminal_summary(terminalreporter):
    if not helpers.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(helpers.ACCEPTANCE):
        terminalreporter.write_line(line)
