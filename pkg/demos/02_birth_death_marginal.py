"""
The position marginal is a classical birth-death chain
======================================================

The atomic dissipators do not change the trace of each block, so the
site populations of the continuous-time walk obey a closed chain with
down rate gamma (n_th+1) eps^2 k and up rate gamma n_th eps^2 (k+1).
We integrate both and compare.
"""

# %%
import numpy as np

from thermal_oqw import ModelParams, OdeProblem, WalkerState, integrate, ode_rhs
from thermal_oqw.observables import birth_death_oracle, first_moment, geometric_distribution, tv_distance

p = ModelParams(g=0.02, delta=1.0, gamma=0.2, n_th=1.0, dt=0.02, k_max=120)
start = WalkerState.point_mass(p.k_max, 20, "ground")
times = [100.0, 500.0, 1000.0]

# %%
# Full block equation on (k_max+1) 2x2 blocks.
samples = {}
integrate(
    OdeProblem(start.blocks, lambda y: ode_rhs(y, p), 0.0, 1000.0, 0.1),
    lambda t, y: samples.__setitem__(round(t, 6), np.real(y[:, 0, 0] + y[:, 1, 1])),
    times,
)

# %%
# Scalar chain from the same starting law.
_, oracle = birth_death_oracle(start.traces(), p, 1000.0, sample_times=times)
for t in times:
    prob = samples[t]
    mu = float(np.arange(prob.size) @ prob)
    print(f"t = {t:6g}: TV = {tv_distance(prob, oracle[t]):.1e}, mu = {mu:.5f}, closed form {first_moment(20, p, t):.5f}")

# %%
# Relaxation is slow (rate gamma eps^2 = 8e-5), so the geometric fixed point is far off.
print("TV to the geometric law at t = 1000:", f"{tv_distance(samples[1000.0], geometric_distribution(p.n_th, p.k_max)):.3f}")
