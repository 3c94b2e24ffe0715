import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion and assert it."""

    def _report(number, name, checks, ok=None):
        """``checks`` is a list of (label, value, tol); all must hold unless ``ok`` is given."""
        if ok is None:
            ok = all(v <= t for _, v, t in checks)
        parts = "; ".join(f"{label} {v:.3e} (tol {t:.1e})" for label, v, t in checks)
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {name}: {parts}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
