import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from adiapulse.params import LambdaSystem
from adiapulse.propagator import propagate_lambda

# derandomized so reruns are reproducible; no deadline because the first
# call of the jitted integrator loads its cache
settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    propagate_lambda(LambdaSystem.simultaneous(1.0, 1.0, 1.0, 1.0, 2.0), np.array([-1.0, 1.0]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, repeated in the terminal summary so it
# survives output capture
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
