"""
The fair clustering objective
=============================

A constraint fixes how much mass of every group profile each cluster
receives. For fixed centers the cheapest assignment is a transportation
problem per profile.
"""

# %%
import numpy as np

from faircoreset import Dataset, brute_force_objective, evaluate_objective, group_level_view

# %%
X = Dataset.single_group([[0.0], [1.0], [3.0]])
C = np.array([[0.0], [3.0]])
plan = evaluate_objective(X, [[2], [1]], C, z=1)
print("cost", plan.objective, "labels", plan.cluster_of(X.n))

# %% [markdown]
# Forcing everything into the first cluster under k-means: 0 + 1 + 9.

# %%
print(evaluate_objective(X, [[3], [0]], C, z=2).objective)

# %% [markdown]
# Overlapping groups: a point may belong to several groups, and its profile
# is the set of those groups.

# %%
rng = np.random.default_rng(1)
pts = rng.normal(size=(8, 2))
groups = [[0], [1], [0, 1], [0], [1], [0, 1], [0], [1]]
D = Dataset.from_groups(pts, groups, n_groups=2)
print("profiles", D.profiles, "sizes", D.class_sizes())

quotas = np.array([[2, 1, 2], [1, 1, 1]], dtype=float)  # k x profiles
centers = rng.normal(size=(2, 2))
print("exact", evaluate_objective(D, quotas, centers, 2).objective)
print("brute force", brute_force_objective(D, quotas, centers, 2))
print("per-group counts\n", group_level_view(quotas, D.profiles, 2))
