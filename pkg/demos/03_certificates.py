"""Sufficient conditions for flocking and the position bound they give.

The regime is set by s = 2 beta (N-1)^2.  Below 1 every initial condition is
certified.  At s = 1 the initial speed must be below an explicit threshold,
and above 1 an inequality between the initial data must hold.
"""

# %%
import numpy as np

import csflock as cf

rng = np.random.Generator(np.random.PCG64(3))
N, h = 3, 0.2
state = cf.random_initial_state(N, 3, rng)
m = cf.block_length(N)

for beta in (0.0, 0.05, 1 / (2 * m), 0.25):
    params = cf.FlockParams(h, beta, N)
    report = cf.certify(cf.CertificateInputs.from_state(state, params))
    bound = f"B0 = {report.B0:.3g}" if report.hypothesis_holds else "no bound"
    print(f"beta = {beta:.4f}  s = {report.s:.2f}  {report.case:<13} {report.status:<14} {bound}")

# %% shrinking the initial velocities brings the stronger cases into reach
params = cf.FlockParams(h, 0.25, N)
v = state.v
while True:
    report = cf.certify(cf.CertificateInputs.from_state(cf.FlockState(state.x, v), params))
    if report.hypothesis_holds:
        break
    v = v / 10
print(f"certified once |v(0)| = {np.linalg.norm(v):.2e}; B0 = {report.B0:.4f}")

# %% check the bound along a few random alternating-leader signals
small = cf.FlockState(state.x, v)
for k in range(3):
    signal = cf.random_alternating_signal(N, 3000, rng)
    traj = cf.simulate(small, signal, params, 3000)
    print(f"signal {k}: sup |xhat| = {traj.xhat_norms().max():.4f} <= {report.B0:.4f}")

# %% the decay envelope for the relative velocities
inputs = cf.CertificateInputs.from_state(small, params)
measured = traj.vhat_inf_norms()
for t in (0, 100, 1000, 3000):
    print(f"t = {t:>4}: measured {measured[t]:.3e} <= envelope {report.envelope(t, inputs):.3e}")
# the envelope uses the worst weight allowed by B0 and is very conservative
