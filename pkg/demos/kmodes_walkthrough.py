"""
k-modes on binary flow features
===============================

A look at the clustering step on its own: modes are column majorities and
distances count mismatching bits.
"""
import numpy as np

from flowareas import hamming, kmodes
from flowareas.clustering import derive_seed, pairwise_hamming

rng = np.random.default_rng(0)

# two prototypes that differ in half of their 12 bits, plus a little noise
a = rng.integers(0, 2, 12).astype(np.uint8)
b = a.copy()
b[:6] ^= 1
rows = np.vstack([np.tile(a, (30, 1)), np.tile(b, (20, 1))])
flip = rng.random(rows.shape) < 0.05
rows = rows ^ flip.astype(np.uint8)
print("distance between prototypes:", hamming(a, b))

model = kmodes(rows, 2, seed=3, keep_history=True)
print("sizes:", model.sizes, "cost:", model.cost, "iterations:", model.iterations)
print("cost per iteration:", model.cost_trace)

# every row sits with its nearest mode; ties would go to the lower index
d = pairwise_hamming(rows, model.modes)
assert (d.argmin(axis=1) == model.assignments).all()

# modes versus prototypes
for j, mode in enumerate(model.modes):
    print(j, mode, "-> a:", hamming(mode, a), "b:", hamming(mode, b))

# each k in a suite gets its own seed, derived from the master seed
print({k: derive_seed(42, k) for k in (2, 3, 5, 10)})
