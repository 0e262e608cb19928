"""
Temperature sweep
=================

A sweep over the thermal occupation, using the same runner as the CLI.
The variance grows much faster in a hotter cavity.  The mean drifts
towards n_th at rate gamma eps^2 (mu - n_th), so from site 20 a colder
cavity actually pulls the mean slightly harder.
"""

# %%
import tempfile

from thermal_oqw.config import RunConfig
from thermal_oqw.observables import tv_distance
from thermal_oqw.runner import read_csv, run_sweep, run_walk

base = RunConfig(g=0.02, delta=1.0, gamma=0.2, n_th=1.0, dt=0.02, n_steps=10_000, initial_site=20)

# %%
with tempfile.TemporaryDirectory() as out:
    run_sweep(base, [0.5, 1.0, 2.0, 5.0], out, centered=True)
    for row in read_csv(f"{out}/sweep.csv"):
        print(f"n_th = {row['n_th']:4g}: drift/step = {row['v_mu_step']:+.3e}, sigma^2/step = {row['v_sigma2_step']:.3e}")

# %%
# How much the law still changes between 2e4 and 5e4 steps.  Less change
# means closer to the asymptotic shape.
with tempfile.TemporaryDirectory() as out:
    for n_th in (0.5, 5.0):
        cfg = base.with_changes(n_th=n_th, n_steps=50_000, record_every=10_000)
        recs = {r.step: r for r in run_walk(cfg, f"{out}/{n_th}").records}
        print(f"n_th = {n_th}: TV(2e4, 5e4) = {tv_distance(recs[20_000].p, recs[50_000].p):.3f}")
