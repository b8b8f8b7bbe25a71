"""
Coresets on a line
==================

Sorted positions are cut into batches whose spread stays under a threshold.
k-median keeps one weighted mean per batch; k-means keeps two weighted
points that match the batch's mean and variance.
"""

# %%
import numpy as np

from faircoreset import LineDataset, median_line_coreset, means_line_coreset, partition_batches
from faircoreset import two_point_moment_match
from faircoreset.line_coreset import line_opt

# %% [markdown]
# Batching by hand: with threshold 0.5 on squared deviations, {0, 1} fits
# (0.25 + 0.25) but {0, 1, 2} does not (1 + 0 + 1).

# %%
for b in partition_batches([0.0, 1.0, 2.0, 10.0], xi=0.5, z=2):
    print(b.start, b.stop, b.mean, b.err)

# %% [markdown]
# The two-point replacement of {0, 0, 4}: same weight, mean and spread.

# %%
pairs = two_point_moment_match([0.0, 0.0, 4.0])
print(pairs)
q = np.array([p for p, _ in pairs]); w = np.array([v for _, v in pairs])
print("mean", w @ q / w.sum(), "spread", w @ (q - 4 / 3) ** 2, "expected", 32 / 3)

# %% [markdown]
# Clumpy data compresses well.

# %%
rng = np.random.default_rng(0)
x = np.concatenate([rng.normal(0, 0.05, 300), rng.normal(5, 0.2, 300), rng.normal(9, 0.1, 400)])
L = LineDataset.from_positions(x)
for z, build in ((1, median_line_coreset), (2, means_line_coreset)):
    opt = line_opt(x[::10], 3, z) * 10  # cheap OPT estimate from a subsample
    S = build(L, 3, opt, 0.3)
    print(f"z={z}: {len(x)} points -> {len(S.weights)} weighted points, total weight {S.weights.sum():.0f}")
