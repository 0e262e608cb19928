"""Position statistics of the walker and the classical oracles they are checked against.

The position marginal ``P(k) = Tr rho_k`` of the block master equation obeys
a closed birth-death chain: the atomic dissipators are traceless, leaving

    dp_k/dt = gamma (n_th+1) eps^2 [(k+1) p_{k+1} - k p_k]
            + gamma n_th eps^2 [k p_{k-1} - (k+1) p_k].

Its mean relaxes as ``n_th + (mu0 - n_th) exp(-gamma eps^2 t)`` and its
stationary law is geometric with ratio ``n_th / (n_th + 1)``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .ode import OdeProblem, integrate
from .thermal import ModelParams
from .walk import WalkerState

__all__ = [
    "ObservableRecord",
    "occupation_distribution",
    "mean_and_variance",
    "make_record",
    "birth_death_rhs",
    "birth_death_oracle",
    "first_moment",
    "geometric_distribution",
    "tv_distance",
    "gaussian_fit_residual",
]

NORM_TOL = 1e-6


@dataclass(frozen=True)
class ObservableRecord:
    step: int
    time: float
    p: np.ndarray
    mu: float
    sigma2: float
    v_mu_step: float
    v_mu_time: float
    v_sigma2_step: float
    v_sigma2_time: float
    trace_pre_renorm: float
    leak: float
    min_block_eig: float


def occupation_distribution(state: WalkerState) -> np.ndarray:
    return state.traces()


def mean_and_variance(p: Sequence[float]) -> tuple[float, float]:
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"distribution sums to {total!r}, not 1")
    k = np.arange(p.size)
    mu = float(np.dot(k, p))
    sigma2 = float(np.dot((k - mu) ** 2, p))
    return mu, max(sigma2, 0.0)


def _rate(value: float, denom: float) -> float:
    return value / denom if denom else math.nan


def make_record(state: WalkerState, step: int, dt: float, mu0: float | None = None) -> ObservableRecord:
    """Observables for ``state`` after ``step`` steps of length ``dt``.

    The speeds divide the mean by the elapsed steps and time.  Passing
    ``mu0`` measures the drift from the initial mean instead of the
    absolute mean.  At step 0 the speeds are NaN.
    """
    p = occupation_distribution(state)
    # renormalisation is the caller's policy; moments use the normalised law
    mu, sigma2 = mean_and_variance(p / p.sum())
    drift = mu - mu0 if mu0 is not None else mu
    time = step * dt
    return ObservableRecord(
        step=step,
        time=time,
        p=p,
        mu=mu,
        sigma2=sigma2,
        v_mu_step=_rate(drift, step),
        v_mu_time=_rate(drift, time),
        v_sigma2_step=_rate(sigma2, step),
        v_sigma2_time=_rate(sigma2, time),
        trace_pre_renorm=state.trace_pre_renorm,
        leak=state.leak,
        min_block_eig=state.min_eigenvalue(),
    )


def birth_death_rhs(p: np.ndarray, params: ModelParams) -> np.ndarray:
    """Exact trace dynamics of the block master equation, truncated like it."""
    p = np.asarray(p)
    k = np.arange(p.size)
    _, _, down, up = params.rates(k)
    dp = -(down + up) * p
    dp[:-1] += down[1:] * p[1:]
    dp[1:] += up[:-1] * p[:-1]
    return dp


def birth_death_oracle(
    p0: Sequence[float],
    params: ModelParams,
    t_end: float,
    dt_ode: float = 0.1,
    sample_times: Sequence[float] | None = None,
):
    """Integrate the scalar chain from ``p0`` up to ``t_end``.

    Returns the final distribution, or ``(final, {t: p(t)})`` when
    ``sample_times`` is given.
    """
    p0 = np.asarray(p0, dtype=float)
    if p0.size != params.k_max + 1:
        raise ValueError(f"p0 has {p0.size} sites, params expect {params.k_max + 1}")
    if abs(p0.sum() - 1.0) > NORM_TOL:
        raise ValueError("p0 is not normalised")
    problem = OdeProblem(p0, lambda y: birth_death_rhs(y, params), 0.0, t_end, dt_ode)
    if sample_times is None:
        return integrate(problem)
    samples: dict[float, np.ndarray] = {}
    grid: list[tuple[float, np.ndarray]] = []
    final = integrate(problem, lambda t, y: grid.append((t, y.copy())), sample_times)
    for ts in sample_times:
        samples[ts] = min(grid, key=lambda item: abs(item[0] - ts))[1]
    return final, samples


def first_moment(mu0: float, params: ModelParams, t: float) -> float:
    """Closed-form mean position ``n_th + (mu0 - n_th) exp(-gamma eps^2 t)``."""
    return params.n_th + (mu0 - params.n_th) * math.exp(-params.gamma * params.epsilon**2 * t)


def geometric_distribution(n_th: float, k_max: int) -> np.ndarray:
    """Stationary law ``p_k ~ (n_th / (n_th + 1))**k`` normalised on ``0..k_max``."""
    ratio = n_th / (n_th + 1.0)
    p = ratio ** np.arange(k_max + 1, dtype=float)
    return p / p.sum()


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"support mismatch: {p.shape} vs {q.shape}")
    return 0.5 * float(np.sum(np.abs(p - q)))


def gaussian_fit_residual(p: Sequence[float]) -> tuple[float, float, float]:
    """Moment-matched discrete Gaussian on the same support; returns ``(mu, sigma2, rmse)``."""
    p = np.asarray(p, dtype=float)
    mu, sigma2 = mean_and_variance(p)
    if sigma2 <= 0:
        raise ValueError("degenerate distribution (zero variance) has no Gaussian fit")
    k = np.arange(p.size)
    g = np.exp(-((k - mu) ** 2) / (2.0 * sigma2))
    g /= g.sum()
    rmse = float(np.sqrt(np.mean((p - g) ** 2)))
    return mu, sigma2, rmse
