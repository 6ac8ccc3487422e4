import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chanquery.channels import make_rng

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""

    def log(criterion: int, ok: bool, detail: str):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return make_rng(12345)


def assert_close(a, b, tol=1e-10, rel=0.0):
    assert abs(a - b) <= tol + rel * abs(b), f"{a} vs {b} (tol {tol}, rel {rel})"


def as_np(x):
    return np.asarray(x, dtype=complex)
