"""Coresets for fair k-median / k-means of points lying on a line.

Sorted positions are cut greedily into maximal batches whose moment error
about the batch mean stays under a threshold; each batch is then replaced
by its mean (k-median) or by two weighted points matching its first two
moments (k-means).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WeightedPointSet


@dataclass(frozen=True, eq=False)
class LineDataset:
    """Positions along ``origin + t * direction``, sorted ascending."""

    positions: np.ndarray
    origin: np.ndarray
    direction: np.ndarray
    source_indices: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if np.any(np.diff(pos) < 0):
            raise ValueError("positions must be sorted ascending")
        direction = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
            raise ValueError("direction must have unit norm")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "source_indices", np.asarray(self.source_indices, dtype=np.int64))

    @classmethod
    def from_positions(cls, positions) -> "LineDataset":
        """The real line itself (d = 1); positions are sorted on the way in."""
        pos = np.asarray(positions, dtype=float)
        order = np.argsort(pos, kind="stable")
        return cls(pos[order], np.zeros(1), np.ones(1), order)

    def __len__(self) -> int:
        return len(self.positions)

    def lift(self, positions) -> np.ndarray:
        t = np.asarray(positions, dtype=float)
        return self.origin[None, :] + t[:, None] * self.direction[None, :]


@dataclass(frozen=True)
class Batch:
    start: int
    stop: int
    mean: float
    err: float

    @property
    def size(self) -> int:
        return self.stop - self.start


def _abs_dev(seg: np.ndarray, mu: float) -> float:
    return float(np.abs(seg - mu).sum())


def partition_batches(L, xi: float, z: int) -> list[Batch]:
    """Greedy left-to-right maximal batches with moment error <= ``xi``.

    A batch keeps growing while its error stays <= xi (ties extend).
    """
    pos = L.positions if isinstance(L, LineDataset) else np.asarray(L, dtype=float)
    n = len(pos)
    if n == 0:
        raise ValueError("cannot batch an empty line")
    if z not in (1, 2):
        raise ValueError(f"z must be 1 or 2, got {z}")
    if xi < 0:
        raise ValueError("xi must be nonnegative")

    batches = []
    start = 0
    while start < n:
        # Running moments are kept relative to the first point of the batch.
        base = pos[start]
        count, mu, m2 = 1, 0.0, 0.0
        err = 0.0
        stop = start + 1
        while stop < n:
            y = pos[stop] - base
            c = count + 1
            new_mu = mu + (y - mu) / c
            if z == 2:
                new_m2 = m2 + (y - mu) * (y - new_mu)
                new_err = new_m2
            else:
                new_err = _abs_dev(pos[start:stop + 1] - base, new_mu)
            if new_err > xi:
                break
            count, mu, err = c, new_mu, new_err
            if z == 2:
                m2 = new_m2
            stop += 1
        batches.append(Batch(start, stop, float(base + mu), float(err)))
        start = stop
    return batches


def two_point_moment_match(batch) -> list[tuple[float, float]]:
    """Replace unit-weight positions by <= 2 weighted points in their hull.

    Total weight, mean and second central moment are preserved.  The left
    point sits at the batch minimum; Bhatia-Davis keeps the right one at or
    below the maximum.
    """
    b = np.asarray(batch, dtype=float).ravel()
    n = len(b)
    if n == 0:
        raise ValueError("empty batch")
    lo, hi = float(b.min()), float(b.max())
    offsets = b - lo
    a = float(offsets.mean())
    var = float(((offsets - a) ** 2).mean())
    if a <= 0.0 or var <= 0.0:
        return [(lo + a, float(n))]
    step = var / a
    right = min(lo + a + step, hi)
    span = right - lo
    w_left = n * (span - a) / span
    if w_left <= 0.0:
        return [(lo + a, float(n))]
    return [(lo, w_left), (right, n - w_left)]


def _check_inputs(L: LineDataset, opt_estimate: float, epsilon: float):
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if len(L) == 0:
        raise ValueError("empty line")
    if not opt_estimate > 0 and L.positions[-1] > L.positions[0]:
        raise ValueError("opt_estimate must be positive for points with nonzero spread")


def median_threshold(k: int, opt_estimate: float, epsilon: float) -> float:
    return epsilon * opt_estimate / (30.0 * k)


def means_threshold(k: int, opt_estimate: float, epsilon: float) -> float:
    return epsilon ** 2 * opt_estimate / (200.0 * k ** 2)


def line_batches(L: LineDataset, k: int, z: int, opt_estimate: float,
                 epsilon: float) -> list[Batch]:
    """Batches at the threshold matching ``z``: eps*OPT/(30k) for k-median,
    eps^2*OPT/(200k^2) for k-means."""
    _check_inputs(L, opt_estimate, epsilon)
    if z == 1:
        xi = median_threshold(k, opt_estimate, epsilon)
    elif z == 2:
        xi = means_threshold(k, opt_estimate, epsilon)
    else:
        raise ValueError(f"z must be 1 or 2, got {z}")
    if L.positions[-1] == L.positions[0]:
        return [Batch(0, len(L), float(L.positions[0]), 0.0)]
    return partition_batches(L, xi, z)


def coreset_from_batches(L: LineDataset, batches: list[Batch], z: int,
                         profile: int = 0) -> WeightedPointSet:
    pos, w = [], []
    for b in batches:
        if z == 1 or b.size == 1:
            pos.append(b.mean)
            w.append(float(b.size))
            continue
        for q, weight in two_point_moment_match(L.positions[b.start:b.stop]):
            pos.append(q)
            w.append(weight)
    return WeightedPointSet(L.lift(np.array(pos)), np.array(w), np.full(len(w), profile))


def median_line_coreset(L: LineDataset, k: int, opt_estimate: float, epsilon: float,
                        profile: int = 0) -> WeightedPointSet:
    """Fair k-median coreset: each batch collapses to its mean, weighted by size."""
    return coreset_from_batches(L, line_batches(L, k, 1, opt_estimate, epsilon), 1, profile)


def means_line_coreset(L: LineDataset, k: int, opt_estimate: float, epsilon: float,
                       profile: int = 0) -> WeightedPointSet:
    """Fair k-means coreset: each batch becomes its two-point moment match."""
    return coreset_from_batches(L, line_batches(L, k, 2, opt_estimate, epsilon), 2, profile)


def line_coreset(L: LineDataset, k: int, z: int, opt_estimate: float, epsilon: float,
                 profile: int = 0) -> WeightedPointSet:
    return coreset_from_batches(L, line_batches(L, k, z, opt_estimate, epsilon), z, profile)


def line_opt(positions, k: int, z: int) -> float:
    """Exact unconstrained (k, z)-clustering cost on the line.

    Optimal clusters on a line are contiguous, so a DP over split points is
    exact; O(k n^2) with closed-form segment costs.
    """
    x = np.sort(np.asarray(positions, dtype=float))
    n = len(x)
    k = min(k, n)

    def seg_cost(i, j):
        seg = x[i:j]
        if z == 2:
            return float(((seg - seg.mean()) ** 2).sum())
        return float(np.abs(seg - np.median(seg)).sum())

    cost = np.array([[seg_cost(i, j) if j > i else 0.0 for j in range(n + 1)] for i in range(n + 1)])
    best = cost[0].copy()
    for _ in range(1, k):
        best = np.array([min(best[i] + cost[i, j] for i in range(j + 1)) for j in range(n + 1)])
    return float(best[n])
