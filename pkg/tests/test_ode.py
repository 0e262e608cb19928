import math

import numpy as np
import pytest

from conftest import PAPER
from thermal_oqw import ModelParams, WalkerState, ode_rhs
from thermal_oqw.ode import IntegrationError, OdeProblem, integrate


def decay(dt):
    return integrate(OdeProblem(np.array([1.0]), lambda y: -y, 0.0, 1.0, dt))[0]


def test_zero_rhs_leaves_state_unchanged():
    y0 = np.array([1.0, -2.0, 3.5])
    np.testing.assert_array_equal(integrate(OdeProblem(y0, np.zeros_like, 0.0, 5.0, 0.3)), y0)


def test_scalar_decay_against_closed_form():
    assert abs(decay(0.01) - math.exp(-1)) <= 1e-9


def test_fourth_order_convergence():
    e1 = abs(decay(0.1) - math.exp(-1))
    e2 = abs(decay(0.05) - math.exp(-1))
    assert 12 <= e1 / e2 <= 20


def test_last_step_lands_on_t_end():
    seen = []
    integrate(
        OdeProblem(np.array([1.0]), lambda y: -y, 0.0, 1.05, 0.1),
        recorder=lambda t, y: seen.append(t),
        sample_times=[0.0, 0.52, 1.05],
    )
    assert seen[0] == 0.0 and seen[-1] == 1.05
    assert seen[1] == pytest.approx(0.5)
    # partial final step still integrates exactly to t_end
    y = integrate(OdeProblem(np.array([1.0]), lambda y: -y, 0.0, 1.05, 0.01))[0]
    assert y == pytest.approx(math.exp(-1.05), abs=1e-10)


def test_complex_state_supported():
    y = integrate(OdeProblem(np.array([1.0 + 0j]), lambda y: 1j * y, 0.0, math.pi, 0.001))[0]
    assert abs(y + 1) < 1e-10


@pytest.mark.filterwarnings("ignore:overflow")
def test_blow_up_reports_time():
    with pytest.raises(IntegrationError) as info:
        integrate(OdeProblem(np.array([1.0]), lambda y: y * y * 1e300, 0.0, 1.0, 0.1))
    assert 0 < info.value.time <= 1.0


def test_problem_validation():
    with pytest.raises(ValueError):
        OdeProblem(np.zeros(1), np.zeros_like, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        OdeProblem(np.zeros(1), np.zeros_like, 1.0, 0.0, 0.1)


def test_rhs_is_linear(rng):
    p = ModelParams(**PAPER, n_th=2, k_max=15)
    a = rng.normal(size=(16, 2, 2)) + 1j * rng.normal(size=(16, 2, 2))
    b = rng.normal(size=(16, 2, 2)) + 1j * rng.normal(size=(16, 2, 2))
    np.testing.assert_allclose(ode_rhs(2 * a - 3j * b, p), 2 * ode_rhs(a, p) - 3j * ode_rhs(b, p), atol=1e-14)


def test_block_equation_preserves_trace_and_hermiticity():
    p = ModelParams(**PAPER, n_th=5, k_max=200)
    y0 = WalkerState.point_mass(200, 20, np.array([[0.5, 0.3 - 0.1j], [0.3 + 0.1j, 0.5]])).blocks
    y = integrate(OdeProblem(y0, lambda r: ode_rhs(r, p), 0.0, 1000.0, 0.1))
    assert abs(np.sum(y[:, 0, 0].real + y[:, 1, 1].real) - 1) <= 1e-10
    assert np.max(np.abs(y - np.conj(np.swapaxes(y, 1, 2)))) <= 1e-11
