import math

import numpy as np
import pytest

from conftest import PAPER
from thermal_oqw import ModelParams, WalkerState
from thermal_oqw.observables import (
    birth_death_oracle,
    birth_death_rhs,
    first_moment,
    gaussian_fit_residual,
    geometric_distribution,
    make_record,
    mean_and_variance,
    occupation_distribution,
    tv_distance,
)


def test_occupation_distribution_cases():
    p = occupation_distribution(WalkerState.point_mass(30, 20))
    assert p[20] == 1 and p.sum() == 1
    blocks = np.zeros((2, 2, 2), dtype=complex)
    blocks[0] = np.diag([0.25, 0.25])
    blocks[1] = np.diag([0.5, 0.0])
    np.testing.assert_array_equal(occupation_distribution(WalkerState(blocks)), [0.5, 0.5])


def test_mean_and_variance_cases():
    p = np.zeros(41)
    p[20] = 1
    assert mean_and_variance(p) == (20.0, 0.0)
    p = np.zeros(41)
    p[10] = p[20] = 0.5
    assert mean_and_variance(p) == (15.0, 25.0)
    with pytest.raises(ValueError):
        mean_and_variance([0.5, 0.4])


def test_bose_einstein_moments():
    # n_th = 1: geometric with ratio 1/2 has mean n_th and variance n_th (n_th + 1)
    mu, sigma2 = mean_and_variance(geometric_distribution(1.0, 200))
    assert mu == pytest.approx(1.0, abs=1e-12)
    assert sigma2 == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("n_th", [0.5, 1.0, 5.0])
def test_geometric_law_is_stationary(n_th):
    p = ModelParams(**PAPER, n_th=n_th, k_max=400)
    geo = geometric_distribution(n_th, 400)
    # truncation only matters where the law is already ~ ratio**400
    assert np.linalg.norm(birth_death_rhs(geo, p)) <= 1e-12


def test_first_moment_closed_form_value():
    p = ModelParams(**PAPER, n_th=5.0)
    assert first_moment(20, p, 1000.0) == pytest.approx(5 + 15 * math.exp(-0.08), rel=1e-15)
    assert first_moment(20, p, 1000.0) == pytest.approx(18.847, abs=5e-4)


def test_birth_death_oracle_first_moment():
    p = ModelParams(**PAPER, n_th=5.0)
    p0 = np.zeros(201)
    p0[20] = 1
    final = birth_death_oracle(p0, p, 1000.0, dt_ode=0.5)
    assert mean_and_variance(final)[0] == pytest.approx(first_moment(20, p, 1000.0), rel=1e-9)


def test_birth_death_oracle_zero_gamma():
    p = ModelParams(g=0.02, delta=1, gamma=0.0, n_th=3, dt=0.02, k_max=30)
    p0 = np.full(31, 1 / 31)
    np.testing.assert_array_equal(birth_death_oracle(p0, p, 50.0), p0)


def test_birth_death_oracle_samples():
    p = ModelParams(**PAPER, n_th=1.0, k_max=40)
    p0 = np.zeros(41)
    p0[5] = 1
    final, samples = birth_death_oracle(p0, p, 20.0, sample_times=[0.0, 10.0, 20.0])
    np.testing.assert_array_equal(samples[0.0], p0)
    np.testing.assert_array_equal(samples[20.0], final)
    with pytest.raises(ValueError):
        birth_death_oracle(p0[:-1], p, 1.0)


def test_tv_distance_cases():
    p = np.array([0.2, 0.3, 0.5])
    assert tv_distance(p, p) == 0
    assert tv_distance([1, 0], [0, 1]) == 1
    assert tv_distance([0.5, 0.5], [1, 0]) == 0.5
    with pytest.raises(ValueError):
        tv_distance([1], [0.5, 0.5])


def test_gaussian_self_fit():
    k = np.arange(201)
    g = np.exp(-((k - 50) ** 2) / (2 * 25.0))
    mu, sigma2, rmse = gaussian_fit_residual(g / g.sum())
    assert mu == pytest.approx(50, abs=1e-9)
    assert sigma2 == pytest.approx(25, rel=1e-6)
    assert rmse <= 1e-4


def test_gaussian_fit_flags_non_gaussian_shapes():
    # two separated spikes on a short support
    p = np.array([0.5, 0, 0, 0, 0.5])
    assert gaussian_fit_residual(p)[2] > 0.1
    with pytest.raises(ValueError):
        gaussian_fit_residual(np.array([0.0, 1.0, 0.0]))


def test_record_speeds_are_pure_functions():
    state = WalkerState.point_mass(40, 12)
    rec0 = make_record(state, 0, 0.02)
    assert rec0.mu == 12 and math.isnan(rec0.v_mu_step)
    rec = make_record(state, 250, 0.02)
    assert rec.v_mu_step * 250 == pytest.approx(rec.mu, rel=1e-15)
    assert rec.v_mu_time * rec.time == pytest.approx(rec.mu, rel=1e-15)
    assert rec.time == 5.0
    centred = make_record(state, 250, 0.02, mu0=12.0)
    assert centred.v_mu_step == 0.0
