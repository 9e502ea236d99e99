import numpy as np
import pytest

from betashrink.prior import BetaMixturePrior


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def prior73():
    return BetaMixturePrior(0.9, 7.0, 3.0, 3.0)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(label: str, ok: bool, detail: str) -> None:
        line = f"[{label}] {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s[3:s.index("]")])):
            terminalreporter.write_line(line)
