import numpy as np
import pytest

from thermal_oqw import ModelParams

PAPER = dict(g=0.02, delta=1.0, gamma=0.2, dt=0.02)


def random_blocks(rng, n_sites, zero_edges=False):
    """Random PSD blocks with unit total trace."""
    x = rng.normal(size=(n_sites, 2, 2)) + 1j * rng.normal(size=(n_sites, 2, 2))
    rho = x @ np.conj(np.swapaxes(x, 1, 2))
    if zero_edges:
        rho[0] = 0
        rho[-1] = 0
    return rho / np.sum(rho[:, 0, 0].real + rho[:, 1, 1].real)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def paper_params():
    return ModelParams(n_th=1.0, **PAPER)


# acceptance verdicts, printed at the end of the session in criterion order
ACCEPTANCE: dict[int, str] = {}


def report(number: int, passed: bool, detail: str) -> bool:
    line = f"AC{number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
