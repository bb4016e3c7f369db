"""How long each leader stays in charge shapes the final common velocity.

With agent 1 leading first, a longer dwell lets it drag the others toward
its own velocity before the next leader takes over.
"""

# %%
from dataclasses import replace
from pathlib import Path

import numpy as np

from csflock import harness

base = replace(harness.load_config(Path(__file__).with_name("three_agents.cfg")), steps=2000)
dwells = [1, 5, 15, 35]  # steps; at h = 0.2 these are 0.2, 1, 3 and 7 time units

# %%
rows = harness.dwell_sweep(base, dwells)
v1 = harness.initial_state(base).v[0]
print("agent 1 starts at", np.round(v1, 4))
for r in rows:
    print(
        f"dwell {r.dwell:>2}: common velocity {np.round(r.asymptotic_velocity, 4)}, "
        f"distance to agent 1 {r.distances[0]:.4f}, aligned (|vhat| < 1e-3) from step {r.alignment_step}"
    )

# %% the trend across many seeds
monotone = 0
seeds = range(20)
for seed in seeds:
    d = [r.distances[0] for r in harness.dwell_sweep(base.with_seed(seed), dwells)]
    monotone += all(a >= b for a, b in zip(d, d[1:]))
print(f"distance non-increasing in dwell for {monotone}/{len(seeds)} seeds")
