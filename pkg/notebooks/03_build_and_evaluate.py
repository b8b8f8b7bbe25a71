"""
Building a fair coreset
=======================

Each profile class gets its own summary: points are projected onto a few
lines, and every line is compressed with the 1-D construction.
"""

# %%
import tempfile
from pathlib import Path

from faircoreset import (CoresetParams, build_fair_coreset, empirical_error, load_coreset,
                         save_coreset, synthetic_mixture, uniform_coreset)

# %%
D = synthetic_mixture(n=2000, k=3, n_groups=2, seed=0)
params = CoresetParams(epsilon=0.2, k=3, z=1, seed=0)
A = build_fair_coreset(D, params)
print(f"{D.n} points -> {A.size} weighted points")
for entry in A.build_log:
    print(entry["profile"], entry["n"], "lines", entry["lines"], "size", entry["size"])

# %% [markdown]
# Compare against a uniform sample of the same size on shared random
# constraints and centers.

# %%
U = uniform_coreset(D, A.size, seed=0)
print("ours   ", empirical_error(D, A.points, 3, 1, trials=100).max_error)
print("uniform", empirical_error(D, U.points, 3, 1, trials=100).max_error)

# %%
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "coreset.csv"
    save_coreset(A, path)
    print(path.read_text().splitlines()[:3])
    print("round trip equal:", load_coreset(path) == A)
