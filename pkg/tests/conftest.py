import numpy as np
import pytest

from intertrade.ingest import DurationSeries


def make_series(tau, day, bins, symbol="T"):
    bins = np.asarray(bins)
    return DurationSeries(symbol, tau, day, bins, (bins >= 120).astype(np.int8), {"units": "s"})


@pytest.fixture
def toy_calendar():
    """Three days; bin 0 trades every day, bin 5 only on day 0, bin 130 on days 1 and 2."""
    day = [0, 0, 0, 1, 1, 2, 2, 2]
    bins = [0, 0, 5, 0, 130, 0, 130, 130]
    tau = [1.0, 3.0, 10.0, 4.0, 6.0, 2.0, 1.0, 5.0]
    return make_series(tau, day, bins)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
