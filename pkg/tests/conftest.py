import pytest
from hypothesis import HealthCheck, settings

from diffn.rng import Xoshiro256
from helpers import ACCEPTANCE_KEY

settings.register_profile(
    "diffn",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("diffn")


@pytest.fixture
def rng():
    return Xoshiro256(12345, "fixture", 0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
