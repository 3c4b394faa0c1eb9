import pytest

from nlsoliton.field import Grid, WaveguideParams
from nlsoliton.soliton import SolitonParams


@pytest.fixture
def unit_waveguide():
    return WaveguideParams(omega0=10.0, k0=3.0, vg=2.0, gvd_C=2.0, kerr_K=2.0)


@pytest.fixture
def unit_soliton():
    return SolitonParams(1.0, 1.0)


@pytest.fixture
def wide_grid():
    return Grid.centered(40.0, 1024)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
