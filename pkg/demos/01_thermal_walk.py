"""
A walker on the Fock ladder of a thermal cavity
===============================================

The atom sits in a detuned cavity.  Each step it may emit or absorb a
thermal photon, or nudge the photon number up or down by one.  The photon
number is the walker's position.  Starting at site 20 the walker drifts
towards the thermal mean and spreads out.
"""

# %%
import numpy as np

from thermal_oqw import ModelParams, StepPolicy, WalkerState, build_transition_set, evolve
from thermal_oqw.observables import gaussian_fit_residual, mean_and_variance

# %%
# Parameters of the benchmark: g = 0.02, delta = 1, gamma = 0.2, dt = 0.02.
# The small parameter eps = g / delta sets how slowly the walker moves.
p = ModelParams(g=0.02, delta=1.0, gamma=0.2, n_th=5.0, dt=0.02)
print(f"eps = {p.epsilon}, chi = {p.chi:.1e}")
print("rates at k = 20 (emission, absorption, down, up):", [f"{r:.3e}" for r in p.rates(20)])

# %%
# Build the transition set and walk 2e4 steps, keeping a snapshot every 5000.
ts = build_transition_set(p, "paper")
snapshots = {}
evolve(
    WalkerState.point_mass(p.k_max, 20, "ground"),
    ts,
    StepPolicy.default_for(ts),
    20_000,
    5000,
    lambda n, s: snapshots.__setitem__(n, s.traces() / s.total_trace()),
)

# %%
# Mean drifts left, variance grows.
for n, prob in snapshots.items():
    mu, var = mean_and_variance(prob)
    print(f"step {n:6d}: mu = {mu:8.4f}, sigma^2 = {var:8.4f}")

# %%
# The distribution after 2e4 steps is close to a Gaussian.
_, _, rmse = gaussian_fit_residual(snapshots[20_000])
print(f"Gaussian rmse at 2e4 steps: {rmse:.2e}")

# %%
# A crude text histogram of the final distribution.
prob = snapshots[20_000]
for k in range(10, 32, 2):
    print(f"{k:3d} {'#' * int(np.round(prob[k] * 400))}")
