"""Instance generators and brute-force sweeps shared by the test modules."""

import itertools

import numpy as np

from faircoreset import Dataset, ProfileConstraint, objective
from faircoreset.line_coreset import line_opt


def compositions(total, k):
    """All ways to write ``total`` as an ordered sum of ``k`` nonnegative ints."""
    for bars in itertools.combinations(range(total + k - 1), k - 1):
        edges = (-1,) + bars + (total + k - 1,)
        yield [edges[i + 1] - edges[i] - 1 for i in range(k)]


def random_constraint(rng, sizes, k):
    quotas = np.zeros((k, len(sizes)))
    for t, n_t in enumerate(sizes):
        cuts = np.sort(rng.integers(0, int(n_t) + 1, size=k - 1))
        quotas[:, t] = np.diff(np.concatenate(([0], cuts, [int(n_t)])))
    return ProfileConstraint(quotas)


def random_instance(rng, n_max=10, k_max=3, gamma_max=2, dim=2, n_min=1):
    """Small random fair-clustering instance (X, F, C) with every profile nonempty."""
    k = int(rng.integers(1, k_max + 1))
    gamma = int(rng.integers(1, gamma_max + 1))
    n = int(rng.integers(max(n_min, gamma), n_max + 1))
    pts = rng.normal(size=(n, dim)) * rng.choice([0.1, 1.0, 10.0])
    labels = np.concatenate([np.arange(gamma), rng.integers(gamma, size=n - gamma)])
    rng.shuffle(labels)
    X = Dataset(pts, labels, tuple((t,) for t in range(gamma)), gamma)
    F = random_constraint(rng, X.class_sizes(), k)
    C = rng.normal(size=(k, dim)) * rng.choice([0.5, 2.0])
    return X, F, C


def clumped_positions(rng, n):
    """Positions in a few tight clumps, so greedy batching merges points."""
    n_clumps = int(rng.integers(2, 4))
    centres = rng.uniform(0, 10, size=n_clumps)
    widths = rng.choice([0.01, 0.1, 0.5], size=n_clumps)
    which = rng.integers(n_clumps, size=n)
    return np.sort(centres[which] + rng.normal(size=n) * widths[which])


def center_grid(x, size=20):
    lo, hi = float(np.min(x)), float(np.max(x))
    pad = 0.1 * (hi - lo) + 0.5
    return np.linspace(lo - pad, hi + pad, size)


def line_sweep_violations(x, S, k, z, eps, grid, rtol=1e-9):
    """Every (F, C) over all compositions and grid center tuples where
    ``|K(S) - K(X)| > eps/3 * K(X)``; returns the offending cases."""
    X = Dataset.single_group(x)
    bad = []
    comps = list(compositions(len(x), k))
    for combo in itertools.combinations_with_replacement(grid, k):
        C = np.array(combo)[:, None]
        for F in comps:
            Fm = ProfileConstraint(np.array(F, dtype=float)[:, None])
            kx = objective(X, Fm, C, z)
            ks = objective(S, Fm, C, z)
            if abs(ks - kx) > (eps / 3) * kx * (1 + rtol) + 1e-12:
                bad.append((combo, F, kx, ks))
    return bad


def true_line_opt(x, k, z):
    return line_opt(x, k, z)
