"""Floors and brackets of stochastic matrices.

The floor of a stochastic matrix collects its column minima.  The bracket
removes that common part from every row, and its infinity norm measures
how far the matrix is from having identical rows.
"""

# %%
import numpy as np

import csflock as cf

A = np.array([[0.7, 0.3], [0.4, 0.6]])
print("floor:", cf.floor(A))
print("bracket:\n", cf.bracket(A))
print(f"||[A]|| = {cf.inf_norm(cf.bracket(A)):.3f} = 1 - sum(floor) = {1 - cf.floor(A).sum():.3f}")

# %% brackets are sub-multiplicative, so products contract
rng = np.random.Generator(np.random.PCG64(0))
F1, F2 = cf.random_stochastic(4, rng), cf.random_stochastic(4, rng)
gap = (cf.bracket(F2) @ cf.bracket(F1) - cf.bracket(F2 @ F1)).min()
print(f"min entry of [F2][F1] - [F2 F1] = {gap:.3g} (never negative)")

# %% strong rootedness is a positive column, and a positive column means ||[F]|| < 1
g = cf.Digraph(3, frozenset({(1, 2), (1, 3)}))
chi = g.adjacency.astype(float)
F = cf.flocking_matrix(np.diag(chi.sum(axis=1)) - chi, h=0.2)
print("strong roots:", set(cf.is_strongly_rooted(g).strong_roots), " ||[F]|| =", cf.inf_norm(cf.bracket(F)))

# %% a chain is rooted but not strongly rooted; composing it with itself fixes that
chain = cf.Digraph(3, frozenset({(1, 2), (2, 3)}))
print("chain strongly rooted?", cf.is_strongly_rooted(chain).strongly_rooted)
twice = cf.compose_sequence([chain] * cf.block_length(3))
print("after a block of", cf.block_length(3), "steps:", set(cf.is_strongly_rooted(twice).strong_roots))

# %% the floor of a growing product climbs toward the limit row
seq = [cf.random_stochastic(3, rng, sparsity=0.3) for _ in range(30)]
trace = cf.product_floor_limit(seq).floor_trace
for t in (0, 4, 9, 29):
    print(f"after {t + 1:>2} factors: floor = {np.round(trace[t], 5)}, sum = {trace[t].sum():.6f}")
